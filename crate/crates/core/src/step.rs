//! Piecewise constant functions on `[0, 1]`.
//!
//! Pieces are left-closed and right-open, except the last one which is
//! closed, so every `x` in `[0, 1]` belongs to exactly one piece. Binary
//! operations work on the common refinement of the two breakpoint sets,
//! which keeps sums, differences and L² norms exact up to rounding.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawStep", into = "RawStep")]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    // Breakpoints are exactly j / len; evaluation then uses the same
    // floor rule as the cell partition.
    uniform: bool,
}

#[derive(Serialize, Deserialize)]
struct RawStep {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<RawStep> for StepFunction {
    type Error = Error;

    fn try_from(raw: RawStep) -> Result<Self> {
        StepFunction::new(raw.breakpoints, raw.values)
    }
}

impl From<StepFunction> for RawStep {
    fn from(s: StepFunction) -> Self {
        RawStep {
            breakpoints: s.breakpoints,
            values: s.values,
        }
    }
}

impl PartialEq for StepFunction {
    fn eq(&self, other: &Self) -> bool {
        self.breakpoints == other.breakpoints && self.values == other.values
    }
}

fn is_uniform(breakpoints: &[f64]) -> bool {
    let n = (breakpoints.len() - 1) as f64;
    breakpoints
        .iter()
        .enumerate()
        .all(|(j, &b)| b == j as f64 / n)
}

impl StepFunction {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidStepFunction(
                "need at least two breakpoints".into(),
            ));
        }
        if values.len() + 1 != breakpoints.len() {
            return Err(Error::InvalidStepFunction(format!(
                "{} values for {} breakpoints",
                values.len(),
                breakpoints.len()
            )));
        }
        if breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
            return Err(Error::InvalidStepFunction(
                "breakpoints must start at 0 and end at 1".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidStepFunction(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        let uniform = is_uniform(&breakpoints);
        Ok(StepFunction {
            breakpoints,
            values,
            uniform,
        })
    }

    /// Step function on `values.len()` equal pieces.
    pub fn uniform(values: Vec<f64>) -> Self {
        assert!(!values.is_empty(), "a step function needs at least one piece");
        let n = values.len();
        let breakpoints = (0..=n).map(|j| j as f64 / n as f64).collect();
        StepFunction {
            breakpoints,
            values,
            uniform: true,
        }
    }

    pub fn constant(value: f64) -> Self {
        Self::uniform(vec![value])
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(left, right, value)` for each piece, left to right.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(&self.values)
            .map(|(w, &v)| (w[0], w[1], v))
    }

    /// Index of the piece containing `x`; points outside `[0, 1]` map to
    /// the nearest end piece.
    pub fn piece_index(&self, x: f64) -> usize {
        let n = self.values.len();
        if self.uniform {
            if x <= 0.0 {
                return 0;
            }
            return ((x * n as f64).floor() as usize).min(n - 1);
        }
        let idx = self.breakpoints.partition_point(|&b| b <= x);
        idx.saturating_sub(1).min(n - 1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.values[self.piece_index(x)]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> StepFunction {
        StepFunction {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
            uniform: self.uniform,
        }
    }

    pub fn shift(&self, delta: f64) -> StepFunction {
        self.map(|v| v + delta)
    }

    pub fn scale(&self, factor: f64) -> StepFunction {
        self.map(|v| v * factor)
    }

    /// Combines two step functions piecewise on their common refinement.
    pub fn zip_with(&self, other: &StepFunction, f: impl Fn(f64, f64) -> f64) -> StepFunction {
        if self.breakpoints == other.breakpoints {
            return StepFunction {
                breakpoints: self.breakpoints.clone(),
                values: self
                    .values
                    .iter()
                    .zip(&other.values)
                    .map(|(&a, &b)| f(a, b))
                    .collect(),
                uniform: self.uniform,
            };
        }
        let (p, q) = (&self.breakpoints, &other.breakpoints);
        let mut breakpoints = vec![0.0];
        let mut values = Vec::with_capacity(p.len() + q.len());
        let (mut i, mut j) = (0, 0);
        while i + 1 < p.len() && j + 1 < q.len() {
            let (ri, rj) = (p[i + 1], q[j + 1]);
            values.push(f(self.values[i], other.values[j]));
            let right = ri.min(rj);
            breakpoints.push(right);
            if ri <= right {
                i += 1;
            }
            if rj <= right {
                j += 1;
            }
        }
        let uniform = is_uniform(&breakpoints);
        StepFunction {
            breakpoints,
            values,
            uniform,
        }
    }

    pub fn integral(&self) -> f64 {
        self.pieces().map(|(a, b, v)| v * (b - a)).sum()
    }

    /// Exact `∫₀¹ self · other`.
    pub fn inner(&self, other: &StepFunction) -> f64 {
        self.zip_with(other, |a, b| a * b).integral()
    }

    pub fn l2_norm_squared(&self) -> f64 {
        self.pieces().map(|(a, b, v)| v * v * (b - a)).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_squared().sqrt()
    }

    pub fn l2_distance_squared(&self, other: &StepFunction) -> f64 {
        (self - other).l2_norm_squared()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Add for &StepFunction {
    type Output = StepFunction;

    fn add(self, rhs: &StepFunction) -> StepFunction {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &StepFunction {
    type Output = StepFunction;

    fn sub(self, rhs: &StepFunction) -> StepFunction {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul<f64> for &StepFunction {
    type Output = StepFunction;

    fn mul(self, rhs: f64) -> StepFunction {
        self.scale(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn evaluation_convention() {
        let s = StepFunction::new(vec![0.0, 0.25, 1.0], vec![1.0, 2.0]).unwrap();
        assert_eq!(s.eval(0.0), 1.0);
        assert_eq!(s.eval(0.2499), 1.0);
        assert_eq!(s.eval(0.25), 2.0);
        assert_eq!(s.eval(1.0), 2.0);
        let u = StepFunction::uniform(vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(u.eval(0.5), 3.0);
        assert_eq!(u.eval(1.0), 4.0);
        assert_eq!(u.eval(0.0), 1.0);
    }

    #[test]
    fn rejects_malformed() {
        assert!(StepFunction::new(vec![0.0, 1.0], vec![]).is_err());
        assert!(StepFunction::new(vec![0.0, 0.5, 0.5, 1.0], vec![1.0; 3]).is_err());
        assert!(StepFunction::new(vec![0.1, 1.0], vec![1.0]).is_err());
    }

    #[test]
    fn refinement_arithmetic_is_exact() {
        let a = StepFunction::uniform(vec![1.0, 3.0]);
        let b = StepFunction::new(vec![0.0, 0.25, 1.0], vec![2.0, 0.0]).unwrap();
        let d = &a - &b;
        assert_eq!(d.breakpoints(), &[0.0, 0.25, 0.5, 1.0]);
        assert_eq!(d.values(), &[-1.0, 1.0, 3.0]);
        // (-1)^2/4 + 1/4 + 9/2
        assert_eq!(d.l2_norm_squared(), 0.25 + 0.25 + 4.5);
        assert_eq!(a.inner(&b), 0.5);
    }

    #[test]
    fn serde_round_trip_validates() {
        let s = StepFunction::uniform(vec![0.5, 0.25]);
        let json = serde_json::to_string(&s).unwrap();
        let back: StepFunction = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<StepFunction>(r#"{"breakpoints":[0,1],"values":[]}"#).is_err());
    }

    fn arb_step() -> impl Strategy<Value = StepFunction> {
        prop::collection::vec((0.01f64..1.0, -5.0f64..5.0), 1..8).prop_map(|parts| {
            let total: f64 = parts.iter().map(|p| p.0).sum();
            let mut bp = vec![0.0];
            let mut acc = 0.0;
            for (w, _) in &parts[..parts.len() - 1] {
                acc += w / total;
                bp.push(acc);
            }
            bp.push(1.0);
            StepFunction::new(bp, parts.iter().map(|p| p.1).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn pointwise_difference(a in arb_step(), b in arb_step(), x in 0.0f64..=1.0) {
            let d = &a - &b;
            prop_assert!((d.eval(x) - (a.eval(x) - b.eval(x))).abs() < 1e-12);
        }

        #[test]
        fn polarisation_identity(a in arb_step(), b in arb_step()) {
            let lhs = (&a + &b).l2_norm_squared();
            let rhs = a.l2_norm_squared() + b.l2_norm_squared() + 2.0 * a.inner(&b);
            prop_assert!((lhs - rhs).abs() < 1e-9);
        }
    }
}
