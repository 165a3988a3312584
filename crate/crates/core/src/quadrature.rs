//! Adaptive composite Simpson quadrature.
//!
//! Every oracle value that has no closed form goes through [`integrate`].
//! The absolute tolerance is split between the two halves of each refined
//! interval, and a Richardson step is applied on acceptance.

use crate::error::{Error, Result};

/// Absolute tolerance used by all oracles.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Hard cap on the number of accepted subintervals.
pub const MAX_SUBINTERVALS: usize = 1 << 20;

/// Integrates `f` over `[a, b]` to absolute tolerance [`DEFAULT_TOLERANCE`].
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Result<f64> {
    integrate_with(f, a, b, DEFAULT_TOLERANCE, MAX_SUBINTERVALS)
}

struct Segment {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

pub fn integrate_with<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_intervals: usize,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return integrate_with(f, b, a, tol, max_intervals).map(|v| -v);
    }
    let fail = || Error::Quadrature {
        a,
        b,
        tol,
        max_intervals,
    };

    // Seed with a coarse uniform split so that features narrower than the
    // whole interval are not missed by the first Simpson estimate.
    const SEED: usize = 8;
    let width = (b - a) / SEED as f64;
    let mut stack = Vec::with_capacity(64);
    for j in (0..SEED).rev() {
        let lo = a + width * j as f64;
        let hi = if j + 1 == SEED { b } else { a + width * (j + 1) as f64 };
        let mid = 0.5 * (lo + hi);
        let (fa, fm, fb) = (f(lo), f(mid), f(hi));
        stack.push(Segment {
            a: lo,
            b: hi,
            fa,
            fm,
            fb,
            whole: simpson(lo, hi, fa, fm, fb),
            tol: tol / SEED as f64,
            depth: 0,
        });
    }

    let mut total = 0.0;
    let mut accepted = 0usize;
    while let Some(seg) = stack.pop() {
        let mid = 0.5 * (seg.a + seg.b);
        let lm = 0.5 * (seg.a + mid);
        let rm = 0.5 * (mid + seg.b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(seg.a, mid, seg.fa, flm, seg.fm);
        let right = simpson(mid, seg.b, seg.fm, frm, seg.fb);
        let delta = left + right - seg.whole;
        if !delta.is_finite() {
            return Err(fail());
        }
        let tiny = mid <= seg.a || mid >= seg.b || seg.depth >= 60;
        if delta.abs() <= 15.0 * seg.tol || tiny {
            if tiny && delta.abs() > 15.0 * seg.tol {
                return Err(fail());
            }
            total += left + right + delta / 15.0;
            accepted += 1;
            if accepted > max_intervals {
                return Err(fail());
            }
            continue;
        }
        if stack.len() + accepted >= max_intervals {
            return Err(fail());
        }
        let half = 0.5 * seg.tol;
        stack.push(Segment {
            a: mid,
            b: seg.b,
            fa: seg.fm,
            fm: frm,
            fb: seg.fb,
            whole: right,
            tol: half,
            depth: seg.depth + 1,
        });
        stack.push(Segment {
            a: seg.a,
            b: mid,
            fa: seg.fa,
            fm: flm,
            fb: seg.fm,
            whole: left,
            tol: half,
            depth: seg.depth + 1,
        });
    }
    Ok(total)
}
