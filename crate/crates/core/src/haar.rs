//! The Haar basis on `[0, 1]` and its Dirichlet kernel.
//!
//! Every `i >= 1` is written uniquely as `i = 2^{q-1} + p` with
//! `0 <= p < 2^{q-1}`, and indexes the dyadic interval
//! `J_i = [p / 2^{q-1}, (p + 1) / 2^{q-1})`, closed on the right when `J_i`
//! touches 1. Then `e_0 = 1` and `e_i = 2^{(q-1)/2} (1_{J_{2i}} - 1_{J_{2i+1}})`.

use crate::error::{Error, Result};
use crate::frontier::FrontierSpec;
use crate::step::StepFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DyadicIndex {
    pub i: u64,
    pub p: u64,
    pub q: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DyadicInterval {
    pub left: f64,
    pub right: f64,
    pub right_closed: bool,
}

impl DyadicInterval {
    pub fn contains(&self, x: f64) -> bool {
        x >= self.left && (x < self.right || (self.right_closed && x == self.right))
    }
}

pub fn dyadic_index(i: u64) -> Result<DyadicIndex> {
    if i == 0 {
        return Err(Error::ZeroDyadicIndex);
    }
    let q = u64::BITS - i.leading_zeros();
    Ok(DyadicIndex {
        i,
        p: i - (1 << (q - 1)),
        q,
    })
}

pub fn haar_interval(i: u64) -> Result<DyadicInterval> {
    let DyadicIndex { p, q, .. } = dyadic_index(i)?;
    let width = (-((q - 1) as f64)).exp2();
    Ok(DyadicInterval {
        left: p as f64 * width,
        right: (p + 1) as f64 * width,
        right_closed: p + 1 == 1 << (q - 1),
    })
}

fn check_unit(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::OutOfUnitInterval(x))
    }
}

fn check_blocks(h_n: u64) -> Result<u64> {
    let blocks = h_n.checked_add(1).ok_or(Error::NotPowerOfTwo(0))?;
    if blocks.is_power_of_two() {
        Ok(blocks)
    } else {
        Err(Error::NotPowerOfTwo(blocks))
    }
}

/// `e_i(x)` without domain checks. `x` must lie in `[0, 1]`.
pub(crate) fn basis(i: u64, x: f64) -> f64 {
    if i == 0 {
        return 1.0;
    }
    let q = u64::BITS - i.leading_zeros();
    let p = i - (1 << (q - 1));
    // Support of e_i is J_i; its left half is J_{2i}, its right half J_{2i+1}.
    let scale = (q as f64).exp2();
    let t = x * scale;
    let lo = 2 * p;
    let amplitude = (0.5 * (q - 1) as f64).exp2();
    let last = p + 1 == 1 << (q - 1);
    if t < lo as f64 {
        0.0
    } else if t < (lo + 1) as f64 {
        amplitude
    } else if t < (lo + 2) as f64 || (last && t == (lo + 2) as f64) {
        -amplitude
    } else {
        0.0
    }
}

/// `e_i(x)` for `x` in `[0, 1]`.
pub fn haar_eval(i: u64, x: f64) -> Result<f64> {
    check_unit(x)?;
    Ok(basis(i, x))
}

/// `e_i` as an exact step function on `2^{q_i}` equal pieces.
pub fn haar_as_step(i: u64) -> StepFunction {
    if i == 0 {
        return StepFunction::constant(1.0);
    }
    let pieces = 1usize << (u64::BITS - i.leading_zeros());
    let values = (0..pieces)
        .map(|j| basis(i, (j as f64 + 0.5) / pieces as f64))
        .collect();
    StepFunction::uniform(values)
}

/// `Σ_{i <= coefficients.len()-1} c_i e_i(x)`.
pub fn haar_series(coefficients: &[f64], x: f64) -> f64 {
    coefficients
        .iter()
        .enumerate()
        .map(|(i, c)| c * basis(i as u64, x))
        .sum()
}

/// `K_n(x, y) = (h_n + 1) 1_{J_ℓ(x)}(y)`, the closed form of the Dirichlet
/// kernel of order `h_n`.
pub fn dirichlet_kernel(h_n: u64, x: f64, y: f64) -> Result<f64> {
    let blocks = check_blocks(h_n)?;
    check_unit(x)?;
    check_unit(y)?;
    let block = |t: f64| ((t * blocks as f64).floor() as u64).min(blocks - 1);
    Ok(if block(x) == block(y) { blocks as f64 } else { 0.0 })
}

/// `Σ_{i=0}^{h_n} e_i(x) e_i(y)`, the defining sum of the Dirichlet kernel.
pub fn dirichlet_kernel_sum(h_n: u64, x: f64, y: f64) -> Result<f64> {
    check_blocks(h_n)?;
    check_unit(x)?;
    check_unit(y)?;
    Ok((0..=h_n).map(|i| basis(i, x) * basis(i, y)).sum())
}

/// `f_n`: the projection of `f` on `e_0, …, e_{h_n}`, i.e. the averages of
/// `f` over the `h_n + 1` dyadic blocks.
pub fn truncated_expansion(f: &FrontierSpec, h_n: u64) -> Result<StepFunction> {
    let blocks = check_blocks(h_n)? as usize;
    let width = 1.0 / blocks as f64;
    let values = (0..blocks)
        .map(|l| {
            let a = l as f64 * width;
            let b = (l + 1) as f64 * width;
            f.integral(a, b).map(|v| v * blocks as f64)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StepFunction::uniform(values))
}

/// `a_i = ∫₀¹ e_i(t) f(t) dt`.
pub fn haar_coefficient(f: &FrontierSpec, i: u64) -> Result<f64> {
    if i == 0 {
        return f.area();
    }
    let support = haar_interval(i)?;
    let DyadicIndex { q, .. } = dyadic_index(i)?;
    let amplitude = (0.5 * (q - 1) as f64).exp2();
    let mid = 0.5 * (support.left + support.right);
    Ok(amplitude * (f.integral(support.left, mid)? - f.integral(mid, support.right)?))
}
