//! Monte Carlo experiments checking the estimators against exact laws and
//! the limit theorems.
//!
//! Every replicate draws from its own ChaCha stream, keyed by schedule
//! entry and replicate index, and results are reduced in replicate order.
//! A run therefore produces the same bytes for any worker count.
//!
//! Each experiment returns rows of `estimate`, standard error, comparator
//! and tolerance; see [`report::Check`] for how rows pass or fail.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::error::{Error, Result};

pub mod config;
mod experiments;
pub mod metrics;
pub mod presets;
pub mod report;
pub mod runner;

pub use config::{Condition, ConfigOverrides, ExperimentConfig, GaussianVariant, RegimeRecord, ScheduleEntry};
pub use metrics::{error_metrics, ErrorMetrics};
pub use presets::{preset, presets, Preset};
pub use report::{Check, ExperimentReport, ReportRow, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    /// Law of one cell maximum against the exact distribution function.
    CellLaw,
    /// Bias of `f̂_n(x)` after removing `k_n/(nc)`.
    LocalBias,
    Variance,
    /// Mean integrated squared error and its orthogonal split.
    Mise,
    /// Tail probabilities of the sup-norm error.
    Supnorm,
    Weibull,
    Gumbel,
    Gaussian,
    ZnMoments,
}

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Experiment::CellLaw,
        Experiment::LocalBias,
        Experiment::Variance,
        Experiment::Mise,
        Experiment::Supnorm,
        Experiment::Weibull,
        Experiment::Gumbel,
        Experiment::Gaussian,
        Experiment::ZnMoments,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::CellLaw => "cell_law",
            Experiment::LocalBias => "local_bias",
            Experiment::Variance => "variance",
            Experiment::Mise => "mise",
            Experiment::Supnorm => "supnorm",
            Experiment::Weibull => "weibull",
            Experiment::Gumbel => "gumbel",
            Experiment::Gaussian => "gaussian",
            Experiment::ZnMoments => "zn_moments",
        }
    }

    /// The asymptotic conditions the experiment's theorem relies on.
    pub fn conditions(&self, cfg: &ExperimentConfig) -> Vec<Condition> {
        use Condition::*;
        match self {
            Experiment::CellLaw => vec![],
            Experiment::LocalBias | Experiment::Mise | Experiment::Supnorm | Experiment::ZnMoments => {
                vec![CellsVsLogSample]
            }
            Experiment::Variance => vec![CellsVsLogSample, SampleVsCells],
            Experiment::Weibull => vec![SampleVsCells],
            Experiment::Gumbel => vec![CellsLogCells],
            Experiment::Gaussian => {
                let mut c = vec![BlocksVsCells, CellsVsLogSample];
                if cfg.variants.contains(&GaussianVariant::Centered) {
                    c.push(GaussianCentered);
                }
                if cfg.variants.iter().any(|v| *v != GaussianVariant::Centered) {
                    c.push(GaussianCorrected);
                }
                c
            }
        }
    }

    pub fn run(&self, cfg: &ExperimentConfig) -> Result<ExperimentReport> {
        cfg.validate()?;
        let f = cfg.frontier_spec()?;
        let alpha = f.lipschitz().map_or(1.0, |l| l.alpha);
        let conditions = self.conditions(cfg);
        let regimes = cfg
            .schedule
            .iter()
            .map(|&e| RegimeRecord::new(e, alpha, &conditions))
            .collect::<Result<Vec<_>>>()?;
        let start = Instant::now();
        let run = experiments::Run { name: self.name(), cfg, f: &f };
        let rows = match self {
            Experiment::CellLaw => experiments::cell_law(&run),
            Experiment::LocalBias => experiments::local_bias(&run),
            Experiment::Variance => experiments::variance(&run),
            Experiment::Mise => experiments::mise(&run),
            Experiment::Supnorm => experiments::supnorm(&run),
            Experiment::Weibull => experiments::weibull(&run),
            Experiment::Gumbel => experiments::gumbel(&run),
            Experiment::Gaussian => experiments::gaussian(&run),
            Experiment::ZnMoments => experiments::zn_moments(&run),
        }?;
        Ok(ExperimentReport {
            experiment: self.name().to_string(),
            config: cfg.clone(),
            regimes,
            rows,
            wall_time_secs: start.elapsed().as_secs_f64(),
        })
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown experiment `{s}`")))
    }
}
