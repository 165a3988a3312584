use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::partition::PartitionConfig;

use super::config::{ExperimentConfig, RegimeRecord};

pub const CSV_HEADER: [&str; 14] = [
    "experiment",
    "frontier",
    "n",
    "c",
    "h_n",
    "d_n",
    "k_n",
    "x",
    "statistic",
    "estimate",
    "std_err",
    "comparator",
    "tolerance",
    "pass",
];

/// How a row's estimate is judged against its comparator. `d` below is
/// `estimate - comparator`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Check {
    /// `|d| <= tol`.
    Within(f64),
    /// `d <= tol`.
    AtMost(f64),
    /// `d >= -tol`.
    AtLeast(f64),
    /// Shown for information, never fails.
    Reported,
}

impl Check {
    pub fn passes(&self, estimate: f64, comparator: f64) -> Option<bool> {
        let d = estimate - comparator;
        match *self {
            Check::Within(tol) => Some(d.abs() <= tol),
            Check::AtMost(tol) => Some(d <= tol),
            Check::AtLeast(tol) => Some(d >= -tol),
            Check::Reported => None,
        }
    }

    fn describe(&self) -> String {
        match *self {
            Check::Within(tol) => format!("|d|<={tol}"),
            Check::AtMost(tol) => format!("d<={tol}"),
            Check::AtLeast(tol) => format!("d>=-{tol}"),
            Check::Reported => "reported".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Reported,
}

impl Verdict {
    fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "true",
            Verdict::Fail => "false",
            Verdict::Reported => "n/a",
        }
    }
}

/// One comparison: an estimate, its Monte Carlo standard error, the
/// comparator it is judged against and the rule used.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub experiment: String,
    pub frontier: String,
    pub n: u64,
    pub c: f64,
    pub h_n: u64,
    pub d_n: u64,
    pub k_n: u64,
    pub x: Option<f64>,
    pub statistic: String,
    /// Name of the ground truth the comparator comes from.
    pub oracle: String,
    pub estimate: f64,
    pub std_err: f64,
    pub comparator: f64,
    pub check: Check,
}

impl ReportRow {
    pub fn verdict(&self) -> Verdict {
        match self.check.passes(self.estimate, self.comparator) {
            Some(true) => Verdict::Pass,
            Some(false) => Verdict::Fail,
            None => Verdict::Reported,
        }
    }

    fn fields(&self) -> [String; 14] {
        [
            self.experiment.clone(),
            self.frontier.clone(),
            self.n.to_string(),
            self.c.to_string(),
            self.h_n.to_string(),
            self.d_n.to_string(),
            self.k_n.to_string(),
            self.x.map(|x| x.to_string()).unwrap_or_default(),
            self.statistic.clone(),
            self.estimate.to_string(),
            self.std_err.to_string(),
            self.comparator.to_string(),
            self.check.describe(),
            self.verdict().as_str().to_string(),
        ]
    }
}

/// Builds rows that share the experiment, frontier and partition columns.
#[derive(Debug, Clone)]
pub(crate) struct RowContext {
    pub experiment: &'static str,
    pub frontier: String,
    pub c: f64,
    pub partition: PartitionConfig,
}

impl RowContext {
    #[allow(clippy::too_many_arguments)]
    pub fn row(
        &self,
        x: Option<f64>,
        statistic: impl Into<String>,
        oracle: impl Into<String>,
        estimate: f64,
        std_err: f64,
        comparator: f64,
        check: Check,
    ) -> ReportRow {
        ReportRow {
            experiment: self.experiment.to_string(),
            frontier: self.frontier.clone(),
            n: self.partition.n(),
            c: self.c,
            h_n: self.partition.h_n(),
            d_n: self.partition.d_n(),
            k_n: self.partition.k_n(),
            x,
            statistic: statistic.into(),
            oracle: oracle.into(),
            estimate,
            std_err,
            comparator,
            check,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub config: ExperimentConfig,
    pub regimes: Vec<RegimeRecord>,
    pub rows: Vec<ReportRow>,
    pub wall_time_secs: f64,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    experiment: &'a str,
    config: &'a ExperimentConfig,
    input_hash: String,
    seed: u64,
    wall_time_secs: f64,
    regimes: &'a [RegimeRecord],
    comparisons: Vec<ComparisonRecord<'a>>,
    rows: usize,
    passed: usize,
    failed: usize,
    reported: usize,
}

#[derive(Debug, Serialize)]
struct ComparisonRecord<'a> {
    statistic: &'a str,
    oracle: &'a str,
    tolerance: String,
}

impl ExperimentReport {
    pub fn count(&self, verdict: Verdict) -> usize {
        self.rows.iter().filter(|r| r.verdict() == verdict).count()
    }

    pub fn all_passed(&self) -> bool {
        self.count(Verdict::Fail) == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| r.verdict() == Verdict::Fail)
    }

    /// First row with the given statistic name and evaluation point.
    pub fn find(&self, statistic: &str, x: Option<f64>) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.statistic == statistic && r.x == x)
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(CSV_HEADER)?;
        for row in &self.rows {
            writer.write_record(row.fields())?;
        }
        writer.flush()?;
        Ok(writer.into_inner().map_err(|e| e.into_error())?)
    }

    pub fn manifest_json(&self) -> Result<String> {
        let mut comparisons: Vec<ComparisonRecord> = Vec::new();
        for row in &self.rows {
            if !comparisons.iter().any(|c| c.statistic == row.statistic) {
                comparisons.push(ComparisonRecord {
                    statistic: &row.statistic,
                    oracle: &row.oracle,
                    tolerance: row.check.describe(),
                });
            }
        }
        let manifest = Manifest {
            experiment: &self.experiment,
            config: &self.config,
            input_hash: input_hash(&self.experiment, &self.config),
            seed: self.config.seed,
            wall_time_secs: self.wall_time_secs,
            regimes: &self.regimes,
            comparisons,
            rows: self.rows.len(),
            passed: self.count(Verdict::Pass),
            failed: self.count(Verdict::Fail),
            reported: self.count(Verdict::Reported),
        };
        Ok(serde_json::to_string_pretty(&manifest)?)
    }

    /// Writes `<experiment>.csv` and `<experiment>.manifest.json` into
    /// `dir`, returning both paths.
    pub fn write_to(&self, dir: impl AsRef<Path>) -> Result<(PathBuf, PathBuf)> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        let csv_path = dir.join(format!("{}.csv", self.experiment));
        let manifest_path = dir.join(format!("{}.manifest.json", self.experiment));
        std::fs::write(&csv_path, self.to_csv()?)?;
        std::fs::write(&manifest_path, self.manifest_json()?)?;
        Ok((csv_path, manifest_path))
    }
}

/// Git-style content hash of everything that determines the results:
/// SHA-256 over `"blob <len>\0"` followed by the canonical config text.
pub fn input_hash(experiment: &str, cfg: &ExperimentConfig) -> String {
    let body = format!("experiment = {experiment}\n{}", cfg.canonical_text());
    let mut hasher = Sha256::new();
    hasher.update(format!("blob {}\0", body.len()).as_bytes());
    hasher.update(body.as_bytes());
    hasher.finalize().iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}
