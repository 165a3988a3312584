//! Experiment configuration and its flat `key = value` text form.
//!
//! ```text
//! # comment
//! frontier = affine:1,0.5
//! schedule = 10000:4:4, 20000:4:4     # n:h':d_n entries
//! c = 1
//! replicates = 2000
//! seed = 7
//! x = 0.3, 0.7
//! ```
//!
//! `n`, `hprime` and `dn` override the matching field of every schedule
//! entry. Later sources override earlier ones: preset, then file, then
//! command-line flags.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::frontier::FrontierSpec;
use crate::partition::PartitionConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ScheduleEntry {
    pub n: u64,
    pub h_prime: u32,
    pub d_n: u64,
}

impl ScheduleEntry {
    pub fn new(n: u64, h_prime: u32, d_n: u64) -> Self {
        ScheduleEntry { n, h_prime, d_n }
    }

    pub fn partition(&self) -> Result<PartitionConfig> {
        PartitionConfig::new(self.n, self.h_prime, self.d_n)
    }
}

impl fmt::Display for ScheduleEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.n, self.h_prime, self.d_n)
    }
}

impl FromStr for ScheduleEntry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').map(str::trim).collect();
        let bad = || Error::Parse(format!("schedule entry `{s}` is not n:h':d_n"));
        if parts.len() != 3 {
            return Err(bad());
        }
        Ok(ScheduleEntry {
            n: parts[0].parse().map_err(|_| bad())?,
            h_prime: parts[1].parse().map_err(|_| bad())?,
            d_n: parts[2].parse().map_err(|_| bad())?,
        })
    }
}

/// How the Gaussian experiment centres the estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GaussianVariant {
    /// `f̂_n(x)` minus its Monte Carlo grand mean.
    Centered,
    /// `f̌_n(x) - f(x)`, using the true intensity.
    OracleCorrected,
    /// `f̃_n(x) - f(x)`, using the minima correction.
    ZCorrected,
}

impl GaussianVariant {
    pub const ALL: [GaussianVariant; 3] = [
        GaussianVariant::Centered,
        GaussianVariant::OracleCorrected,
        GaussianVariant::ZCorrected,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            GaussianVariant::Centered => "centered",
            GaussianVariant::OracleCorrected => "oracle_corrected",
            GaussianVariant::ZCorrected => "z_corrected",
        }
    }
}

impl FromStr for GaussianVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|v| v.name() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown gaussian variant `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub frontier: String,
    pub schedule: Vec<ScheduleEntry>,
    pub c: f64,
    pub replicates: u64,
    pub seed: u64,
    pub x: Vec<f64>,
    /// Thresholds for the sup-norm exceedance probabilities.
    pub epsilon: Vec<f64>,
    pub variants: Vec<GaussianVariant>,
    pub out: PathBuf,
    pub workers: usize,
    pub strict: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            frontier: "constant:1".into(),
            schedule: vec![ScheduleEntry::new(1000, 3, 4)],
            c: 1.0,
            replicates: 1000,
            seed: 1,
            x: vec![0.5],
            epsilon: vec![0.05, 0.1, 0.2],
            variants: vec![GaussianVariant::ZCorrected],
            out: PathBuf::from("results"),
            workers: 1,
            strict: false,
        }
    }
}

impl ExperimentConfig {
    pub fn frontier_spec(&self) -> Result<FrontierSpec> {
        FrontierSpec::from_label(&self.frontier)
    }

    pub fn validate(&self) -> Result<()> {
        self.frontier_spec()?;
        if self.schedule.is_empty() {
            return Err(Error::InvalidParameter("empty schedule".into()));
        }
        for entry in &self.schedule {
            entry.partition()?;
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::InvalidParameter(format!("c must be > 0, got {}", self.c)));
        }
        if self.replicates < 2 {
            return Err(Error::InvalidParameter("need at least 2 replicates".into()));
        }
        if self.workers == 0 {
            return Err(Error::InvalidParameter("workers must be at least 1".into()));
        }
        if self.x.is_empty() {
            return Err(Error::InvalidParameter("no evaluation points".into()));
        }
        if let Some(&x) = self.x.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::OutOfUnitInterval(x));
        }
        if self.variants.is_empty() {
            return Err(Error::InvalidParameter("no gaussian variant selected".into()));
        }
        Ok(())
    }

    /// The fields that determine the results, one `key = value` per line.
    /// Output location, worker count and strictness are left out.
    pub fn canonical_text(&self) -> String {
        let join = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        let schedule: Vec<String> = self.schedule.iter().map(ToString::to_string).collect();
        let variants: Vec<&str> = self.variants.iter().map(GaussianVariant::name).collect();
        format!(
            "frontier = {}\nschedule = {}\nc = {}\nreplicates = {}\nseed = {}\nx = {}\nepsilon = {}\nvariant = {}\n",
            self.frontier,
            schedule.join(","),
            self.c,
            self.replicates,
            self.seed,
            join(&self.x),
            join(&self.epsilon),
            variants.join(","),
        )
    }
}

/// Partial configuration from a file or from flags.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigOverrides {
    pub frontier: Option<String>,
    pub schedule: Option<Vec<ScheduleEntry>>,
    pub n: Option<u64>,
    pub h_prime: Option<u32>,
    pub d_n: Option<u64>,
    pub c: Option<f64>,
    pub replicates: Option<u64>,
    pub seed: Option<u64>,
    pub x: Option<Vec<f64>>,
    pub epsilon: Option<Vec<f64>>,
    pub variants: Option<Vec<GaussianVariant>>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub strict: Option<bool>,
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad value `{value}` for `{key}`")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_value(key, s))
        .collect()
}

impl ConfigOverrides {
    /// Parses the flat text format. Unknown keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut o = ConfigOverrides::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "frontier" => o.frontier = Some(value.to_string()),
                "schedule" => o.schedule = Some(parse_list(key, value)?),
                "n" => o.n = Some(parse_value(key, value)?),
                "hprime" | "h_prime" => o.h_prime = Some(parse_value(key, value)?),
                "dn" | "d_n" => o.d_n = Some(parse_value(key, value)?),
                "c" => o.c = Some(parse_value(key, value)?),
                "replicates" => o.replicates = Some(parse_value(key, value)?),
                "seed" => o.seed = Some(parse_value(key, value)?),
                "x" => o.x = Some(parse_list(key, value)?),
                "epsilon" => o.epsilon = Some(parse_list(key, value)?),
                "variant" | "variants" => o.variants = Some(parse_list(key, value)?),
                "out" => o.out = Some(PathBuf::from(value)),
                "workers" => o.workers = Some(parse_value(key, value)?),
                "strict" => o.strict = Some(parse_value(key, value)?),
                _ => {
                    return Err(Error::Parse(format!(
                        "line {}: unknown key `{key}`",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(o)
    }

    /// Fields set in `later` replace those set here.
    pub fn merged(mut self, later: ConfigOverrides) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if later.$f.is_some() { self.$f = later.$f; } )* };
        }
        take!(frontier, schedule, n, h_prime, d_n, c, replicates, seed, x, epsilon, variants, out, workers, strict);
        self
    }

    pub fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(v) = &self.frontier {
            cfg.frontier = v.clone();
        }
        if let Some(v) = &self.schedule {
            cfg.schedule = v.clone();
        }
        for entry in &mut cfg.schedule {
            if let Some(n) = self.n {
                entry.n = n;
            }
            if let Some(h) = self.h_prime {
                entry.h_prime = h;
            }
            if let Some(d) = self.d_n {
                entry.d_n = d;
            }
        }
        macro_rules! copy {
            ($($f:ident),*) => { $( if let Some(v) = &self.$f { cfg.$f = v.clone(); } )* };
        }
        copy!(c, replicates, seed, x, epsilon, variants, out, workers, strict);
    }
}

/// The asymptotic conditions the limit theorems place on `(n, h_n, k_n)`.
/// Each is of the form `a = o(b)`; the recorded ratio is `a / b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// `k_n = o(n / ln n)`.
    CellsVsLogSample,
    /// `n = o(k_n^{1+α})`.
    SampleVsCells,
    /// `h_n = o(k_n)`.
    BlocksVsCells,
    /// `k_n ln k_n = o(n)`.
    CellsLogCells,
    /// `n = o(k_n^{1/2+α} h_n^{1/2})`, for the centred Gaussian limit.
    GaussianCentered,
    /// `n = o(k_n^{1/2} h_n^{1/2+α})`, for the corrected Gaussian limits.
    GaussianCorrected,
}

impl Condition {
    pub fn expression(&self) -> &'static str {
        match self {
            Condition::CellsVsLogSample => "k_n = o(n/ln n)",
            Condition::SampleVsCells => "n = o(k_n^(1+alpha))",
            Condition::BlocksVsCells => "h_n = o(k_n)",
            Condition::CellsLogCells => "k_n ln k_n = o(n)",
            Condition::GaussianCentered => "n = o(k_n^(1/2+alpha) h_n^(1/2))",
            Condition::GaussianCorrected => "n = o(k_n^(1/2) h_n^(1/2+alpha))",
        }
    }

    pub fn ratio(&self, p: &PartitionConfig, alpha: f64) -> f64 {
        let n = p.n() as f64;
        let k = p.k_n() as f64;
        let h = p.h_n() as f64;
        match self {
            Condition::CellsVsLogSample => k * n.ln() / n,
            Condition::SampleVsCells => n / k.powf(1.0 + alpha),
            Condition::BlocksVsCells => h / k,
            Condition::CellsLogCells => k * k.ln() / n,
            Condition::GaussianCentered => n / (k.powf(0.5 + alpha) * h.sqrt()),
            Condition::GaussianCorrected => n / (k.sqrt() * h.powf(0.5 + alpha)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionRecord {
    pub condition: Condition,
    pub expression: &'static str,
    pub ratio: f64,
    /// Whether the ratio is below 1. Only a rough indication: the
    /// conditions are about growth rates, not about any single point.
    pub ratio_below_one: bool,
}

/// Which conditions a schedule entry is meant to satisfy, with their
/// ratios at that entry.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeRecord {
    pub entry: ScheduleEntry,
    pub h_n: u64,
    pub k_n: u64,
    pub alpha: f64,
    pub conditions: Vec<ConditionRecord>,
}

impl RegimeRecord {
    pub fn new(entry: ScheduleEntry, alpha: f64, conditions: &[Condition]) -> Result<Self> {
        let p = entry.partition()?;
        Ok(RegimeRecord {
            entry,
            h_n: p.h_n(),
            k_n: p.k_n(),
            alpha,
            conditions: conditions
                .iter()
                .map(|&condition| {
                    let ratio = condition.ratio(&p, alpha);
                    ConditionRecord {
                        condition,
                        expression: condition.expression(),
                        ratio,
                        ratio_below_one: ratio < 1.0,
                    }
                })
                .collect(),
        })
    }
}
