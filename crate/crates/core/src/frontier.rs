//! Frontier functions bounding the support of the point process.
//!
//! A [`FrontierSpec`] carries the function together with its global bounds
//! `0 < m <= f <= M`, its Hölder/Lipschitz modulus when it has one, and
//! closed forms for the integrals the oracles need. The shipped shapes
//! (constant, affine, sine, two-level) are integrated exactly; custom
//! frontiers fall back to adaptive quadrature.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::quadrature::integrate;

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type IntegralFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// `|f(x) - f(y)| <= constant * |x - y|^alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lipschitz {
    pub alpha: f64,
    pub constant: f64,
}

impl Lipschitz {
    /// Largest possible variation of `f` over an interval of length `width`.
    pub fn modulus(&self, width: f64) -> f64 {
        self.constant * width.powf(self.alpha)
    }
}

#[derive(Clone)]
enum Shape {
    Constant { a: f64 },
    Affine { a: f64, b: f64 },
    Sine { a: f64, b: f64 },
    /// `low` on `[0, jump)`, `high` on `[jump, 1]`.
    TwoLevel { low: f64, high: f64, jump: f64 },
    Custom {
        eval: RealFn,
        integral: Option<IntegralFn>,
    },
}

#[derive(Clone)]
pub struct FrontierSpec {
    label: String,
    shape: Shape,
    lower: f64,
    upper: f64,
    lipschitz: Option<Lipschitz>,
}

impl fmt::Debug for FrontierSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FrontierSpec")
            .field("label", &self.label)
            .field("m", &self.lower)
            .field("M", &self.upper)
            .field("lipschitz", &self.lipschitz)
            .finish()
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidFrontier(msg.into())
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be finite and > 0, got {v}")))
    }
}

impl FrontierSpec {
    pub fn constant(a: f64) -> Result<Self> {
        check_positive("level", a)?;
        Ok(FrontierSpec {
            label: format!("constant:{a}"),
            shape: Shape::Constant { a },
            lower: a,
            upper: a,
            lipschitz: Some(Lipschitz {
                alpha: 1.0,
                constant: 0.0,
            }),
        })
    }

    /// `f(x) = a + b x`.
    pub fn affine(a: f64, b: f64) -> Result<Self> {
        check_positive("f(0)", a)?;
        check_positive("f(1)", a + b)?;
        Ok(FrontierSpec {
            label: format!("affine:{a},{b}"),
            shape: Shape::Affine { a, b },
            lower: a.min(a + b),
            upper: a.max(a + b),
            lipschitz: Some(Lipschitz {
                alpha: 1.0,
                constant: b.abs(),
            }),
        })
    }

    /// `f(x) = a + b sin(2πx)`.
    pub fn sine(a: f64, b: f64) -> Result<Self> {
        check_positive("a - |b|", a - b.abs())?;
        Ok(FrontierSpec {
            label: format!("sine:{a},{b}"),
            shape: Shape::Sine { a, b },
            lower: a - b.abs(),
            upper: a + b.abs(),
            lipschitz: Some(Lipschitz {
                alpha: 1.0,
                constant: 2.0 * PI * b.abs(),
            }),
        })
    }

    /// Piecewise constant frontier with a single jump. Not Lipschitz.
    pub fn two_level(low: f64, high: f64, jump: f64) -> Result<Self> {
        check_positive("low level", low)?;
        check_positive("high level", high)?;
        if !(jump > 0.0 && jump < 1.0) {
            return Err(invalid(format!("jump must lie in (0, 1), got {jump}")));
        }
        Ok(FrontierSpec {
            label: format!("two-level:{low},{high},{jump}"),
            shape: Shape::TwoLevel { low, high, jump },
            lower: low.min(high),
            upper: low.max(high),
            lipschitz: None,
        })
    }

    /// Arbitrary frontier. The declared bounds and modulus are spot-checked
    /// on a grid and on random pairs.
    pub fn custom(
        label: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        lower: f64,
        upper: f64,
        lipschitz: Option<Lipschitz>,
    ) -> Result<Self> {
        check_positive("m", lower)?;
        if !(upper.is_finite() && upper >= lower) {
            return Err(invalid(format!("M = {upper} must be finite and >= m = {lower}")));
        }
        if let Some(l) = lipschitz {
            if !(l.alpha > 0.0 && l.alpha <= 1.0 && l.constant >= 0.0 && l.constant.is_finite()) {
                return Err(invalid(format!("bad Lipschitz modulus {l:?}")));
            }
        }
        let spec = FrontierSpec {
            label: label.into(),
            shape: Shape::Custom {
                eval: Arc::new(f),
                integral: None,
            },
            lower,
            upper,
            lipschitz,
        };
        spec.spot_check()?;
        Ok(spec)
    }

    /// Attaches a closed-form antiderivative map `(a, b) -> ∫ₐᵇ f` to a
    /// custom frontier.
    pub fn with_exact_integral(mut self, g: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        if let Shape::Custom { integral, .. } = &mut self.shape {
            *integral = Some(Arc::new(g));
        }
        self
    }

    fn spot_check(&self) -> Result<()> {
        const SLACK: f64 = 1e-12;
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f00d);
        for j in 0..=1024 {
            let x = j as f64 / 1024.0;
            let v = self.eval(x);
            if !(v >= self.lower - SLACK && v <= self.upper + SLACK) {
                return Err(invalid(format!(
                    "f({x}) = {v} outside declared [{}, {}]",
                    self.lower, self.upper
                )));
            }
        }
        if let Some(l) = self.lipschitz {
            for _ in 0..4096 {
                let x: f64 = rng.random();
                let y: f64 = rng.random();
                let lhs = (self.eval(x) - self.eval(y)).abs();
                let rhs = l.modulus((x - y).abs());
                if lhs > rhs * (1.0 + 1e-9) + SLACK {
                    return Err(invalid(format!(
                        "Lipschitz bound violated at ({x}, {y}): {lhs} > {rhs}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Parses labels of the form `constant:a`, `affine:a,b`, `sine:a,b`,
    /// `two-level:low,high,jump`.
    pub fn from_label(label: &str) -> Result<Self> {
        let unknown = || Error::UnknownFrontier(label.to_string());
        let (kind, args) = label.split_once(':').ok_or_else(unknown)?;
        let params = args
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| unknown())?;
        match (kind.trim(), params.as_slice()) {
            ("constant", [a]) => Self::constant(*a),
            ("affine", [a, b]) => Self::affine(*a, *b),
            ("sine", [a, b]) => Self::sine(*a, *b),
            ("two-level", [lo, hi, j]) => Self::two_level(*lo, *hi, *j),
            _ => Err(unknown()),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `m = inf f`.
    pub fn lower(&self) -> f64 {
        self.lower
    }

    /// `M = sup f`.
    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn lipschitz(&self) -> Option<Lipschitz> {
        self.lipschitz
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.shape, Shape::Constant { .. })
    }

    pub fn has_exact_integral(&self) -> bool {
        !matches!(self.shape, Shape::Custom { integral: None, .. })
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.shape {
            Shape::Constant { a } => *a,
            Shape::Affine { a, b } => a + b * x,
            Shape::Sine { a, b } => a + b * (2.0 * PI * x).sin(),
            Shape::TwoLevel { low, high, jump } => {
                if x < *jump {
                    *low
                } else {
                    *high
                }
            }
            Shape::Custom { eval, .. } => eval(x),
        }
    }

    /// `∫ₐᵇ f`.
    pub fn integral(&self, a: f64, b: f64) -> Result<f64> {
        Ok(match &self.shape {
            Shape::Constant { a: level } => level * (b - a),
            Shape::Affine { a: c0, b: c1 } => c0 * (b - a) + 0.5 * c1 * (b * b - a * a),
            Shape::Sine { a: c0, b: c1 } => c0 * (b - a) + c1 * sin_integral(a, b),
            Shape::TwoLevel { .. } => self
                .split_at_jump(a, b)
                .map(|(lo, hi, v)| v * (hi - lo))
                .sum(),
            Shape::Custom {
                integral: Some(g), ..
            } => g(a, b),
            Shape::Custom { eval, .. } => integrate(|x| eval(x), a, b)?,
        })
    }

    /// Lebesgue measure of the hypograph `S`.
    pub fn area(&self) -> Result<f64> {
        self.integral(0.0, 1.0)
    }

    /// `(min, max)` of `f` over `[a, b]`.
    ///
    /// Exact for the shipped shapes. Custom frontiers are scanned on a
    /// 64-interval grid and the best grid point is refined by golden-section
    /// search inside its neighbouring bracket.
    pub fn bounds_on(&self, a: f64, b: f64) -> (f64, f64) {
        match &self.shape {
            Shape::Constant { a: level } => (*level, *level),
            Shape::Affine { .. } => {
                let (fa, fb) = (self.eval(a), self.eval(b));
                (fa.min(fb), fa.max(fb))
            }
            Shape::Sine { .. } => {
                let mut lo = self.eval(a).min(self.eval(b));
                let mut hi = self.eval(a).max(self.eval(b));
                for crit in [0.25, 0.75] {
                    if crit > a && crit < b {
                        let v = self.eval(crit);
                        lo = lo.min(v);
                        hi = hi.max(v);
                    }
                }
                (lo, hi)
            }
            Shape::TwoLevel { .. } => self
                .split_at_jump(a, b)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, _, v)| {
                    (lo.min(v), hi.max(v))
                }),
            Shape::Custom { eval, .. } => grid_golden_bounds(|x| eval(x), a, b),
        }
    }

    /// `∫ₐᵇ max(f(x) - u, 0) dx`: the area of the slab above level `u`.
    pub fn exceedance(&self, a: f64, b: f64, u: f64) -> Result<f64> {
        Ok(match &self.shape {
            Shape::Constant { a: level } => (level - u).max(0.0) * (b - a),
            Shape::Affine { .. } => linear_positive_part(a, b, self.eval(a) - u, self.eval(b) - u),
            Shape::TwoLevel { .. } => self
                .split_at_jump(a, b)
                .map(|(lo, hi, v)| (v - u).max(0.0) * (hi - lo))
                .sum(),
            Shape::Sine { a: c0, b: c1 } => {
                let mut cuts = vec![a, b];
                if *c1 != 0.0 {
                    let s = (u - c0) / c1;
                    if s.abs() < 1.0 {
                        let theta = s.asin();
                        for k in -1..=2 {
                            let base = 2.0 * PI * k as f64;
                            for root in [(base + theta) / (2.0 * PI), (base + PI - theta) / (2.0 * PI)] {
                                if root > a && root < b {
                                    cuts.push(root);
                                }
                            }
                        }
                    }
                }
                cuts.sort_by(f64::total_cmp);
                let mut total = 0.0;
                for w in cuts.windows(2) {
                    let (lo, hi) = (w[0], w[1]);
                    if hi > lo && self.eval(0.5 * (lo + hi)) > u {
                        total += c0 * (hi - lo) + c1 * sin_integral(lo, hi) - u * (hi - lo);
                    }
                }
                total
            }
            Shape::Custom { eval, .. } => {
                let (lo, hi) = self.bounds_on(a, b);
                if u >= hi {
                    0.0
                } else if u <= lo {
                    self.integral(a, b)? - u * (b - a)
                } else {
                    integrate(|x| (eval(x) - u).max(0.0), a, b)?
                }
            }
        })
    }

    /// `∫ₐᵇ (v - f(x))² dx`, the squared L² distance on `[a, b]` between
    /// the constant `v` and `f`.
    pub fn squared_distance_to_constant(&self, a: f64, b: f64, v: f64) -> Result<f64> {
        Ok(match &self.shape {
            Shape::Constant { a: level } => (v - level).powi(2) * (b - a),
            Shape::Affine { .. } => {
                let (ga, gb) = (v - self.eval(a), v - self.eval(b));
                (b - a) * (ga * ga + ga * gb + gb * gb) / 3.0
            }
            Shape::TwoLevel { .. } => self
                .split_at_jump(a, b)
                .map(|(lo, hi, level)| (v - level).powi(2) * (hi - lo))
                .sum(),
            Shape::Sine { a: c0, b: c1 } => {
                let d = v - c0;
                let w = b - a;
                let sin_sq = 0.5 * w - ((4.0 * PI * b).sin() - (4.0 * PI * a).sin()) / (8.0 * PI);
                d * d * w - 2.0 * d * c1 * sin_integral(a, b) + c1 * c1 * sin_sq
            }
            Shape::Custom { eval, .. } => integrate(|x| (v - eval(x)).powi(2), a, b)?,
        })
    }

    fn split_at_jump(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64, f64)> {
        let Shape::TwoLevel { low, high, jump } = self.shape else {
            unreachable!("split_at_jump on a continuous frontier")
        };
        let left = (a < jump).then(|| (a, b.min(jump), low));
        let right = (b > jump).then(|| (a.max(jump), b, high));
        left.into_iter().chain(right).filter(|(lo, hi, _)| hi > lo)
    }
}

/// `∫ₐᵇ sin(2πx) dx`.
fn sin_integral(a: f64, b: f64) -> f64 {
    -((2.0 * PI * b).cos() - (2.0 * PI * a).cos()) / (2.0 * PI)
}

/// `∫ max(g, 0)` for `g` linear on `[a, b]` with end values `ga`, `gb`.
fn linear_positive_part(a: f64, b: f64, ga: f64, gb: f64) -> f64 {
    let w = b - a;
    if ga >= 0.0 && gb >= 0.0 {
        0.5 * w * (ga + gb)
    } else if ga <= 0.0 && gb <= 0.0 {
        0.0
    } else {
        let pos = ga.max(gb);
        let frac = pos / (ga - gb).abs();
        0.5 * pos * frac * w
    }
}

fn golden_min(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-13 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

fn grid_golden_bounds(f: impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    const GRID: usize = 64;
    let step = (b - a) / GRID as f64;
    let xs: Vec<f64> = (0..=GRID).map(|j| a + step * j as f64).collect();
    let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let argmin = (0..=GRID).min_by(|&i, &j| vals[i].total_cmp(&vals[j])).unwrap();
    let argmax = (0..=GRID).max_by(|&i, &j| vals[i].total_cmp(&vals[j])).unwrap();
    let bracket = |j: usize| (xs[j.saturating_sub(1)], xs[(j + 1).min(GRID)]);

    let (lo_a, lo_b) = bracket(argmin);
    let (_, refined_min) = golden_min(&f, lo_a, lo_b);
    let (hi_a, hi_b) = bracket(argmax);
    let (_, neg_max) = golden_min(&|x| -f(x), hi_a, hi_b);
    (vals[argmin].min(refined_min), vals[argmax].max(-neg_max))
}
