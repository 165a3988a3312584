//! Closed-form ground truth for the Monte Carlo checks.
//!
//! The maximum `X*_r` of cell `r` satisfies `X*_r <= u` exactly when the
//! cell has no point above level `u`. The region above `u` has area
//! `∫_{I_r} max(f - u, 0)`, hence
//!
//! ```text
//! F_r(u) = exp(-n c ∫_{I_r} max(f(x) - u, 0) dx),   0 <= u <= M_r,
//! ```
//!
//! with `F_r(u) = 0` below 0 and `1` from `M_r` on. The atom at 0 is the
//! probability `exp(-n c λ_r)` of an empty cell. Moments follow by
//! integrating `F_r` (no sampling involved).

use libm::erfc;

use crate::error::{Error, Result};
use crate::frontier::FrontierSpec;
use crate::partition::PartitionConfig;
use crate::quadrature::integrate;

/// A distribution function, possibly with atoms; `cdf_left(u)` is
/// `P(X < u)`.
pub trait Cdf {
    fn cdf(&self, u: f64) -> Result<f64>;

    fn cdf_left(&self, u: f64) -> Result<f64> {
        self.cdf(u)
    }
}

impl<F: Fn(f64) -> f64> Cdf for F {
    fn cdf(&self, u: f64) -> Result<f64> {
        Ok(self(u))
    }
}

/// Exact law of the maximum of one cell.
#[derive(Debug, Clone)]
pub struct CellLaw<'a> {
    f: &'a FrontierSpec,
    left: f64,
    right: f64,
    rate: f64,
    lambda: f64,
    m_cell: f64,
    big_m_cell: f64,
}

impl<'a> CellLaw<'a> {
    /// Law of `X*_r` for the zero-based cell `r`.
    pub fn new(f: &'a FrontierSpec, cfg: &PartitionConfig, r: usize, c: f64) -> Result<Self> {
        if r >= cfg.cells() {
            return Err(Error::InvalidParameter(format!(
                "cell {r} out of range for k_n = {}",
                cfg.k_n()
            )));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("intensity c must be > 0, got {c}")));
        }
        let (left, right) = cfg.cell_interval(r);
        let (m_cell, big_m_cell) = f.bounds_on(left, right);
        Ok(CellLaw {
            f,
            left,
            right,
            rate: cfg.n() as f64 * c,
            lambda: f.integral(left, right)?,
            m_cell,
            big_m_cell,
        })
    }

    pub fn upper(&self) -> f64 {
        self.big_m_cell
    }

    pub fn lower(&self) -> f64 {
        self.m_cell
    }

    /// `P(X*_r = 0)`, the probability that the cell is empty.
    pub fn empty_probability(&self) -> f64 {
        (-self.rate * self.lambda).exp()
    }

    /// `F_r(u)` below `m_r`, where the exceedance area is `λ_r - u |I_r|`.
    fn cdf_below_min(&self, u: f64) -> f64 {
        let width = self.right - self.left;
        (-self.rate * (self.lambda - u * width)).exp()
    }

    /// `E(M_r - X*_r)` and `E((M_r - X*_r)²)`.
    ///
    /// Uses `P(M_r - X* > t) = F_r(M_r - t)`, so
    /// `E(M_r - X*) = ∫₀^{M_r} F_r(v) dv` and
    /// `E((M_r - X*)²) = ∫₀^{M_r} 2 (M_r - v) F_r(v) dv`. The part below
    /// `m_r` is an exponential and is integrated in closed form.
    fn deficit_moments(&self) -> Result<(f64, f64)> {
        let (m, big_m) = (self.m_cell, self.big_m_cell);
        let s = self.rate * (self.right - self.left);
        let g0 = self.cdf_below_min(0.0);
        let gm = self.cdf_below_min(m);
        let mut first = (gm - g0) / s;
        let mut second = 2.0 * ((big_m - m) * gm - big_m * g0) / s + 2.0 * (gm - g0) / (s * s);
        if big_m > m {
            first += integrate(|v| self.cdf_above_min(v), m, big_m)?;
            second += integrate(|v| 2.0 * (big_m - v) * self.cdf_above_min(v), m, big_m)?;
        }
        Ok((first, second))
    }

    fn cdf_above_min(&self, u: f64) -> f64 {
        match self.f.exceedance(self.left, self.right, u) {
            Ok(area) => (-self.rate * area).exp(),
            Err(_) => f64::NAN,
        }
    }

    pub fn mean(&self) -> Result<f64> {
        let (first, _) = self.deficit_moments()?;
        Ok(self.big_m_cell - first)
    }

    pub fn variance(&self) -> Result<f64> {
        let (first, second) = self.deficit_moments()?;
        Ok((second - first * first).max(0.0))
    }
}

impl Cdf for CellLaw<'_> {
    fn cdf(&self, u: f64) -> Result<f64> {
        if u < 0.0 {
            return Ok(0.0);
        }
        if u >= self.big_m_cell {
            return Ok(1.0);
        }
        let area = self.f.exceedance(self.left, self.right, u)?;
        Ok((-self.rate * area).exp())
    }

    fn cdf_left(&self, u: f64) -> Result<f64> {
        if u <= 0.0 {
            Ok(0.0)
        } else {
            self.cdf(u)
        }
    }
}

/// `P(X*_r <= u)` for the zero-based cell `r`.
pub fn cell_cdf(f: &FrontierSpec, cfg: &PartitionConfig, r: usize, c: f64, u: f64) -> Result<f64> {
    CellLaw::new(f, cfg, r, c)?.cdf(u)
}

pub fn cell_max_mean(f: &FrontierSpec, cfg: &PartitionConfig, r: usize, c: f64) -> Result<f64> {
    CellLaw::new(f, cfg, r, c)?.mean()
}

pub fn cell_max_variance(f: &FrontierSpec, cfg: &PartitionConfig, r: usize, c: f64) -> Result<f64> {
    CellLaw::new(f, cfg, r, c)?.variance()
}

/// Limit laws of the normalised estimators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitLaw {
    /// `min(e^u, 1)`, the limit of `T_n(x)` when `d_n = 1`.
    WeibullEvd,
    /// `exp(-e^{-u})`, the limit of the normalised maximal deviation.
    Gumbel,
    StdNormal,
}

impl LimitLaw {
    pub fn name(&self) -> &'static str {
        match self {
            LimitLaw::WeibullEvd => "weibull_evd",
            LimitLaw::Gumbel => "gumbel",
            LimitLaw::StdNormal => "std_normal",
        }
    }

    pub fn cdf_value(&self, u: f64) -> f64 {
        match self {
            LimitLaw::WeibullEvd => u.exp().min(1.0),
            LimitLaw::Gumbel => (-(-u).exp()).exp(),
            LimitLaw::StdNormal => normal_cdf(u),
        }
    }
}

impl Cdf for LimitLaw {
    fn cdf(&self, u: f64) -> Result<f64> {
        Ok(self.cdf_value(u))
    }
}

pub fn limit_cdf(law: LimitLaw, u: f64) -> f64 {
    law.cdf_value(u)
}

/// Standard normal distribution function.
pub fn normal_cdf(u: f64) -> f64 {
    0.5 * erfc(-u / std::f64::consts::SQRT_2)
}

/// Kolmogorov–Smirnov distance between the empirical law of `samples` and
/// `reference`, taking both one-sided limits at every jump of either
/// function.
pub fn ks_statistic(samples: &[f64], reference: &impl Cdf) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("KS statistic of an empty sample".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut worst: f64 = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let v = sorted[i];
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == v {
            j += 1;
        }
        let below = i as f64 / n;
        let upto = (j + 1) as f64 / n;
        worst = worst
            .max((upto - reference.cdf(v)?).abs())
            .max((below - reference.cdf_left(v)?).abs());
        i = j + 1;
    }
    Ok(worst)
}

/// Centering and scaling constants for the limit theorems at a point `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalization {
    /// `σ_n = k_n / (n c √d_n)`.
    pub sigma_n: f64,
    /// `n c / k_n`.
    pub scale: f64,
    /// Zero-based cell containing `x`.
    pub cell: usize,
    /// `k_n λ_{n,r}`, the centering of `T_n(x)`.
    pub k_lambda: f64,
    /// `a_{n,r} = m_{n,r} - k_n / (n c)`.
    pub a_nr: f64,
    /// `ln k_n`, the centering of the Gumbel statistic.
    pub ln_k: f64,
}

impl Normalization {
    /// `T_n(x) = (n c / k_n)(f̂_n(x) - k_n λ_{n,r})`.
    pub fn weibull_statistic(&self, f_hat_x: f64) -> f64 {
        self.scale * (f_hat_x - self.k_lambda)
    }

    /// `(n c / k_n) Z - ln k_n` for the maximal deviation `Z`.
    pub fn gumbel_statistic(&self, max_deviation: f64) -> f64 {
        self.scale * max_deviation - self.ln_k
    }

    /// `σ_n^{-1}(estimate - center)`.
    pub fn standardize(&self, estimate: f64, center: f64) -> f64 {
        (estimate - center) / self.sigma_n
    }
}

pub fn normalizations(f: &FrontierSpec, cfg: &PartitionConfig, c: f64, x: f64) -> Result<Normalization> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfUnitInterval(x));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("intensity c must be > 0, got {c}")));
    }
    let k = cfg.k_n() as f64;
    let nc = cfg.n() as f64 * c;
    let cell = cfg.cell_index(x);
    let (a, b) = cfg.cell_interval(cell);
    let (m_cell, _) = f.bounds_on(a, b);
    Ok(Normalization {
        sigma_n: k / (nc * (cfg.d_n() as f64).sqrt()),
        scale: nc / k,
        cell,
        k_lambda: k * f.integral(a, b)?,
        a_nr: m_cell - k / nc,
        ln_k: k.ln(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::simulate_extremes;

    fn unit() -> FrontierSpec {
        FrontierSpec::constant(1.0).unwrap()
    }

    #[test]
    fn cdf_examples_constant_frontier() {
        let f = unit();
        let p = PartitionConfig::new(100, 0, 10).unwrap();
        assert_eq!(cell_cdf(&f, &p, 3, 1.0, 1.0).unwrap(), 1.0);
        assert_eq!(cell_cdf(&f, &p, 3, 1.0, -0.1).unwrap(), 0.0);
        let v = cell_cdf(&f, &p, 3, 1.0, 0.9).unwrap();
        assert!((v - (-1f64).exp()).abs() < 1e-12);
        assert!((v - 0.36788).abs() < 1e-5);
        // Below the top the law is exp((nc/k)(u - M)).
        for u in [0.0, 0.1, 0.5, 0.77, 0.999] {
            let lemma = ((100.0 / 10.0) * (u - 1.0f64)).exp();
            assert!((cell_cdf(&f, &p, 0, 1.0, u).unwrap() - lemma).abs() < 1e-12);
        }
        assert!(cell_cdf(&f, &p, 10, 1.0, 0.5).is_err());
    }

    #[test]
    fn cdf_is_monotone_with_atom_at_zero() {
        let f = FrontierSpec::sine(1.0, 0.3).unwrap();
        let p = PartitionConfig::new(50, 2, 2).unwrap();
        for r in 0..p.cells() {
            let law = CellLaw::new(&f, &p, r, 1.0).unwrap();
            assert_eq!(law.cdf_left(0.0).unwrap(), 0.0);
            assert!((law.cdf(0.0).unwrap() - law.empty_probability()).abs() < 1e-14);
            assert_eq!(law.cdf(law.upper()).unwrap(), 1.0);
            let mut prev = 0.0;
            for j in 0..=400 {
                let u = law.upper() * j as f64 / 400.0;
                let v = law.cdf(u).unwrap();
                assert!(v >= prev - 1e-15);
                prev = v;
            }
        }
    }

    #[test]
    fn cdf_matches_brute_force_simulation() {
        // f(x) = 0.5 + x on a single cell [0, 1/2): compare with the
        // frequency of {max <= u} over 1e5 replicates.
        let f = FrontierSpec::affine(0.5, 1.0).unwrap();
        let p = PartitionConfig::new(10, 1, 1).unwrap();
        let law = CellLaw::new(&f, &p, 0, 1.0).unwrap();
        let u = 0.75;
        let exact = law.cdf(u).unwrap();
        assert!(law.lower() < u && u < law.upper());
        let reps = 100_000u64;
        let hits = (0..reps)
            .filter(|&s| simulate_extremes(&f, &p, 1.0, 99, s).unwrap().x_star[0] <= u)
            .count() as f64;
        let freq = hits / reps as f64;
        let se = (exact * (1.0 - exact) / reps as f64).sqrt();
        assert!((freq - exact).abs() < 3.0 * se, "freq {freq} exact {exact} se {se}");
    }

    #[test]
    fn moments_of_constant_frontier() {
        let f = unit();
        let p = PartitionConfig::new(100, 0, 10).unwrap();
        let mean = cell_max_mean(&f, &p, 0, 1.0).unwrap();
        let closed = 1.0 - (1.0 - (-10f64).exp()) / 10.0;
        assert!((mean - closed).abs() < 1e-10);
        assert!((mean - 0.9000045).abs() < 1e-7);

        let p = PartitionConfig::new(10_000, 6, 1).unwrap();
        let var = cell_max_variance(&f, &p, 7, 1.0).unwrap();
        assert!((var / 4.096e-5 - 1.0).abs() < 0.01);

        for n in [1_000u64, 100_000, 10_000_000] {
            let p = PartitionConfig::new(n, 3, 1).unwrap();
            let mean = cell_max_mean(&f, &p, 0, 1.0).unwrap();
            let k_over_nc = 8.0 / n as f64;
            assert!((mean - (1.0 - k_over_nc * (1.0 - (-1.0 / k_over_nc).exp()))).abs() < 1e-10);
        }
    }

    #[test]
    fn moments_agree_with_direct_quadrature_of_survival() {
        let f = FrontierSpec::sine(1.0, 0.25).unwrap();
        let p = PartitionConfig::new(200, 3, 1).unwrap();
        for r in [0, 3, 6] {
            let law = CellLaw::new(&f, &p, r, 1.0).unwrap();
            let m = law.upper();
            let direct_mean = integrate(|u| 1.0 - law.cdf(u).unwrap(), 0.0, m).unwrap();
            let direct_sq = integrate(|u| 2.0 * u * (1.0 - law.cdf(u).unwrap()), 0.0, m).unwrap();
            let mean = law.mean().unwrap();
            assert!((mean - direct_mean).abs() < 1e-9);
            assert!((law.variance().unwrap() - (direct_sq - direct_mean.powi(2))).abs() < 1e-8);
        }
    }

    #[test]
    fn limit_cdf_values() {
        assert_eq!(limit_cdf(LimitLaw::WeibullEvd, 0.0), 1.0);
        assert_eq!(limit_cdf(LimitLaw::WeibullEvd, 2.0), 1.0);
        assert!((limit_cdf(LimitLaw::WeibullEvd, -1.0) - (-1f64).exp()).abs() < 1e-16);
        assert!((limit_cdf(LimitLaw::Gumbel, 0.0) - (-1f64).exp()).abs() < 1e-16);
        assert_eq!(limit_cdf(LimitLaw::StdNormal, 0.0), 0.5);
        // Reference values of Φ to 16 digits.
        assert!((normal_cdf(1.0) - 0.841_344_746_068_542_9).abs() < 1e-12, "{}", normal_cdf(1.0));
        assert!((normal_cdf(-3.0) - 0.001_349_898_031_630_094_6).abs() < 1e-12);
        assert!((normal_cdf(1.959_963_984_540_054) - 0.975).abs() < 1e-12);
    }

    #[test]
    fn ks_examples() {
        let law = LimitLaw::StdNormal;
        // Stratified quantiles of the reference law: distance 1/(2N).
        let n = 200;
        let inv = |p: f64| {
            // bisection on Φ
            let (mut lo, mut hi) = (-40.0, 40.0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if normal_cdf(mid) < p {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let samples: Vec<f64> = (0..n).map(|i| inv((2 * i + 1) as f64 / (2 * n) as f64)).collect();
        let d = ks_statistic(&samples, &law).unwrap();
        assert!((d - 0.5 / n as f64).abs() < 1e-9);

        assert!((ks_statistic(&[0.0], &law).unwrap() - 0.5).abs() < 1e-15);
        let d = ks_statistic(&[-5.0, -4.0], &LimitLaw::WeibullEvd).unwrap();
        assert!(d > 0.98);
        let below = ks_statistic(&[-1.0, -2.0], &|u: f64| if u < 0.0 { 0.0 } else { 1.0 }).unwrap();
        assert_eq!(below, 1.0);
        assert!(ks_statistic(&[], &law).is_err());
    }

    #[test]
    fn ks_respects_atoms() {
        let f = unit();
        let p = PartitionConfig::new(1, 0, 1).unwrap();
        let law = CellLaw::new(&f, &p, 0, 1.0).unwrap();
        // A point mass at 0 of the right size should not count as a jump
        // mismatch.
        let e0 = law.empty_probability();
        let mut samples = vec![0.0; (e0 * 1_000_000.0).round() as usize];
        let rest = 1_000_000 - samples.len();
        for i in 0..rest {
            // quantiles of the continuous part
            let target = e0 + (1.0 - e0) * (i as f64 + 0.5) / rest as f64;
            samples.push(1.0 + target.ln());
        }
        assert!(ks_statistic(&samples, &law).unwrap() < 1e-5);
    }

    #[test]
    fn normalization_examples() {
        let f = unit();
        let p = PartitionConfig::new(100, 0, 1).unwrap();
        let p10 = PartitionConfig::new(100, 1, 5).unwrap();
        let z = normalizations(&f, &p, 1.0, 0.5).unwrap();
        assert_eq!(z.sigma_n, 1.0 / 100.0);
        let z = normalizations(&f, &p10, 1.0, 0.5).unwrap();
        assert!((z.a_nr - 0.9).abs() < 1e-15);
        assert!((z.ln_k - 10f64.ln()).abs() < 1e-15);
        let p = PartitionConfig::new(4096, 4, 16).unwrap();
        let z = normalizations(&f, &p, 1.0, 0.3).unwrap();
        assert_eq!(z.sigma_n, 1.0 / 64.0);
        assert!(normalizations(&f, &p, 1.0, 1.2).is_err());
    }
}
