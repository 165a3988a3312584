//! Extreme value estimators of the frontier.
//!
//! All estimators are linear in the cell extremes. `f̂_n` averages the
//! `d_n` cell maxima of each dyadic block; written with the Dirichlet
//! kernel it is `Σ_r K_n(x_r, x) X*_r / k_n`. The minima mean `Z_n`
//! estimates the bias `k_n / (n c)` and is added back to give `f̃_n`.
//!
//! The kernel forms are kept alongside the block-mean forms and serve as
//! cross-checks in the tests.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::haar::{basis, haar_series};
use crate::partition::PartitionConfig;
use crate::process::{CellExtremes, CellStats};
use crate::step::StepFunction;

fn check_cells(stats: &CellExtremes, cfg: &PartitionConfig) {
    assert_eq!(
        stats.cells(),
        cfg.cells(),
        "cell extremes were computed for a different partition"
    );
}

/// `f̂_n`, constant on each of the `h_n + 1` dyadic blocks.
pub fn haar_ev_estimate(stats: &CellExtremes, cfg: &PartitionConfig) -> StepFunction {
    check_cells(stats, cfg);
    let d = cfg.d_n() as f64;
    let values = (0..cfg.blocks())
        .map(|l| stats.x_star[cfg.cells_in_block(l)].iter().sum::<f64>() / d)
        .collect();
    StepFunction::uniform(values)
}

/// `f̂_n(x)` through the Dirichlet kernel sum over all cells.
pub fn haar_ev_kernel_eval(stats: &CellExtremes, cfg: &PartitionConfig, x: f64) -> f64 {
    kernel_sum(stats, cfg, x, 0.0)
}

fn kernel_sum(stats: &CellExtremes, cfg: &PartitionConfig, x: f64, shift: f64) -> f64 {
    check_cells(stats, cfg);
    let k = cfg.k_n() as f64;
    let blocks = cfg.blocks() as f64;
    let target = cfg.block_index(x);
    stats
        .x_star
        .iter()
        .enumerate()
        .map(|(r, &m)| {
            let kernel = if cfg.block_index(cfg.cell_center(r)) == target {
                blocks
            } else {
                0.0
            };
            kernel * (m + shift) / k
        })
        .sum()
}

/// Geffroy's histogram of cell maxima; `f̂_n` with `d_n = 1`.
pub fn geffroy_estimate(stats: &CellExtremes, cfg: &PartitionConfig) -> Result<StepFunction> {
    if cfg.d_n() != 1 {
        return Err(Error::RequiresUnitBlock(cfg.d_n()));
    }
    Ok(haar_ev_estimate(stats, cfg))
}

/// `â_{i,k_n} = Σ_r e_i(x_r) X*_r / k_n` for `i = 0..=h_n`.
pub fn coefficient_estimates(stats: &CellExtremes, cfg: &PartitionConfig) -> Vec<f64> {
    check_cells(stats, cfg);
    let k = cfg.k_n() as f64;
    (0..=cfg.h_n())
        .map(|i| {
            stats
                .x_star
                .iter()
                .enumerate()
                .map(|(r, &m)| basis(i, cfg.cell_center(r)) * m)
                .sum::<f64>()
                / k
        })
        .collect()
}

/// `Z_n`, the mean of the cell minima (empty cells count as 0).
pub fn minima_mean(stats: &CellExtremes) -> f64 {
    stats.z_star.iter().sum::<f64>() / stats.cells() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateBundle {
    pub partition: PartitionConfig,
    pub coefficients: Vec<f64>,
    pub f_hat: StepFunction,
    pub f_tilde: StepFunction,
    pub z_n: f64,
}

impl EstimateBundle {
    /// `Σ_i â_i e_i(x)`.
    pub fn series_eval(&self, x: f64) -> f64 {
        haar_series(&self.coefficients, x)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// `f̂_n`, `Z_n` and `f̃_n = f̂_n + Z_n`.
///
/// The kernel weights of each block sum to `k_n`, so adding `Z_n` to every
/// cell maximum shifts the estimate by exactly `Z_n`.
pub fn corrected_estimate(stats: &CellExtremes, cfg: &PartitionConfig) -> EstimateBundle {
    let f_hat = haar_ev_estimate(stats, cfg);
    let z_n = minima_mean(stats);
    EstimateBundle {
        partition: *cfg,
        coefficients: coefficient_estimates(stats, cfg),
        f_tilde: f_hat.shift(z_n),
        f_hat,
        z_n,
    }
}

/// `f̃_n(x) = Σ_r K_n(x_r, x) (X*_r + Z_n) / k_n`, evaluated from its
/// definition.
pub fn corrected_kernel_eval(stats: &CellExtremes, cfg: &PartitionConfig, x: f64) -> f64 {
    kernel_sum(stats, cfg, x, minima_mean(stats))
}

/// `f̌_n = f̂_n + k_n / (n c)`. Needs the true intensity, so only useful in
/// simulation.
pub fn oracle_corrected_estimate(stats: &CellExtremes, cfg: &PartitionConfig, c: f64) -> Result<StepFunction> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("intensity c must be > 0, got {c}")));
    }
    let shift = cfg.k_n() as f64 / (cfg.n() as f64 * c);
    Ok(haar_ev_estimate(stats, cfg).shift(shift))
}

/// `Y_{n,r} = X*_r / k_n - λ_{n,r}`.
pub fn residuals(stats: &CellStats) -> Vec<f64> {
    let k = stats.extremes.cells() as f64;
    stats
        .extremes
        .x_star
        .iter()
        .zip(&stats.oracle.lambda)
        .map(|(&m, &lambda)| m / k - lambda)
        .collect()
}
