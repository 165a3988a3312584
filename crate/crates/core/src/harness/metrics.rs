use serde::Serialize;

use crate::error::Result;
use crate::frontier::FrontierSpec;
use crate::step::StepFunction;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorMetrics {
    /// `‖estimate - f‖₂`.
    pub l2: f64,
    /// `sup_x |estimate(x) - f(x)|`.
    pub sup: f64,
    /// `|estimate(x) - f(x)|` at each requested point.
    pub at_points: Vec<f64>,
}

/// Distances between a step estimate and the frontier.
///
/// Both are computed piece by piece: the L² part from the closed-form
/// `∫ (f - v)²` over each piece, the sup part from the exact bounds of `f`
/// on the piece (no grid is needed).
pub fn error_metrics(estimate: &StepFunction, f: &FrontierSpec, xs: &[f64]) -> Result<ErrorMetrics> {
    let mut l2_sq = 0.0;
    let mut sup: f64 = 0.0;
    for (a, b, v) in estimate.pieces() {
        l2_sq += f.squared_distance_to_constant(a, b, v)?;
        let (lo, hi) = f.bounds_on(a, b);
        sup = sup.max((v - lo).abs()).max((v - hi).abs());
    }
    Ok(ErrorMetrics {
        l2: l2_sq.max(0.0).sqrt(),
        sup,
        at_points: xs.iter().map(|&x| (estimate.eval(x) - f.eval(x)).abs()).collect(),
    })
}

/// Sample mean and variance with their standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub len: usize,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    /// Standard error of the mean.
    pub mean_se: f64,
    /// Large-sample standard error of the variance, from the fourth
    /// central moment.
    pub variance_se: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Summary {
        let len = values.len();
        let n = len as f64;
        let mean = values.iter().sum::<f64>() / n;
        let (mut m2, mut m4) = (0.0, 0.0);
        for &v in values {
            let d = (v - mean) * (v - mean);
            m2 += d;
            m4 += d * d;
        }
        let variance = if len > 1 { m2 / (n - 1.0) } else { 0.0 };
        let (m2, m4) = (m2 / n, m4 / n);
        Summary {
            len,
            mean,
            variance,
            mean_se: (variance / n).sqrt(),
            variance_se: ((m4 - m2 * m2).max(0.0) / n).sqrt(),
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

/// Median by sorting a copy.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Least-squares slope of `ln y` against `ln x`. `None` with fewer than two
/// distinct abscissae or a non-positive value.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::truncated_expansion;

    #[test]
    fn trivial_metrics() {
        let one = FrontierSpec::constant(1.0).unwrap();
        let m = error_metrics(&StepFunction::constant(1.0), &one, &[0.1, 0.9]).unwrap();
        assert_eq!(m, ErrorMetrics { l2: 0.0, sup: 0.0, at_points: vec![0.0, 0.0] });
        let m = error_metrics(&StepFunction::constant(0.0), &one, &[0.1, 0.9]).unwrap();
        assert!((m.l2 - 1.0).abs() < 1e-15);
        assert_eq!(m.sup, 1.0);
        assert_eq!(m.at_points, vec![1.0, 1.0]);
    }

    #[test]
    fn projection_of_identity() {
        let f = FrontierSpec::custom("x", |x| x.max(1e-300), 1e-300, 1.0, None).unwrap();
        let fn1 = truncated_expansion(&f, 1).unwrap();
        let m = error_metrics(&fn1, &f, &[0.25]).unwrap();
        assert!((m.l2 * m.l2 - 1.0 / 48.0).abs() < 1e-10);
        assert!((m.sup - 0.25).abs() < 1e-6);
        assert!(m.at_points[0] < 1e-12);

        let affine = FrontierSpec::affine(1.0, 0.5).unwrap();
        let fn3 = truncated_expansion(&affine, 3).unwrap();
        let m = error_metrics(&fn3, &affine, &[]).unwrap();
        // Four blocks of width 1/4, slope 1/2: ∫ (s t)² over a centred
        // interval of width w is s² w³ / 12 per block.
        assert!((m.l2 * m.l2 - 4.0 * 0.25 * 0.25f64.powi(3) / 12.0).abs() < 1e-15);
        assert!((m.sup - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn summary_and_slope() {
        let s = Summary::of(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.variance - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!((s.min, s.max), (1.0, 4.0));
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        let pts: Vec<(f64, f64)> = [1.0f64, 2.0, 4.0, 8.0].iter().map(|&x| (x, 3.0 * x.powf(-1.5))).collect();
        assert!((log_log_slope(&pts).unwrap() + 1.5).abs() < 1e-12);
        assert!(log_log_slope(&[(1.0, 1.0)]).is_none());
        assert!(log_log_slope(&[(1.0, 0.0), (2.0, 1.0)]).is_none());
    }
}
