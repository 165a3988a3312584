//! Command-line front end: simulate samples, fit estimates, run
//! experiments.
//!
//! Exit codes: 0 on success, 1 on a usage or input error, 2 when `--strict`
//! is set and some comparison fails its tolerance.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use haar_frontier::estimators::corrected_estimate;
use haar_frontier::harness::{self, ConfigOverrides, GaussianVariant, ScheduleEntry};
use haar_frontier::process::{simulate, CellExtremes};
use haar_frontier::{FrontierSpec, PartitionConfig, PointSample};

#[derive(Parser)]
#[command(name = "frontier", version, about = "Haar series estimation of Poisson point process frontiers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a point sample and write it as CSV.
    Simulate {
        /// Frontier label, e.g. constant:1, affine:1,0.5, sine:1,0.25, two-level:1,1.5,0.5
        #[arg(long, default_value = "constant:1")]
        frontier: String,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the estimators to a sample CSV and write them as JSON.
    Estimate {
        /// Sample written by `simulate`.
        input: PathBuf,
        #[arg(long)]
        hprime: u32,
        #[arg(long)]
        dn: u64,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an experiment or a named preset and write its CSV and manifest.
    Experiment {
        /// Experiment or preset name (see `list-presets`).
        name: String,
        /// Flat key = value file; flags override it.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        flags: ExperimentFlags,
    },
    /// List the named presets.
    ListPresets,
}

#[derive(Args, Default)]
struct ExperimentFlags {
    #[arg(long)]
    frontier: Option<String>,
    /// Replaces n in every schedule entry.
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    c: Option<f64>,
    /// Replaces h' (h_n + 1 = 2^h') in every schedule entry.
    #[arg(long)]
    hprime: Option<u32>,
    /// Replaces d_n in every schedule entry.
    #[arg(long)]
    dn: Option<u64>,
    /// Schedule entries n:h':d_n, comma separated.
    #[arg(long, value_delimiter = ',')]
    schedule: Option<Vec<String>>,
    #[arg(long)]
    replicates: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Evaluation point; repeat for several.
    #[arg(long)]
    x: Vec<f64>,
    /// Sup-norm thresholds, comma separated.
    #[arg(long, value_delimiter = ',')]
    epsilon: Option<Vec<f64>>,
    /// Gaussian variants: centered, oracle_corrected, z_corrected.
    #[arg(long, value_delimiter = ',')]
    variant: Option<Vec<String>>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    /// Exit with status 2 when any comparison fails.
    #[arg(long)]
    strict: bool,
}

impl ExperimentFlags {
    fn overrides(&self) -> Result<ConfigOverrides> {
        let schedule = match &self.schedule {
            Some(entries) => Some(entries.iter().map(|e| e.parse::<ScheduleEntry>()).collect::<Result<Vec<_>, _>>()?),
            None => None,
        };
        let variants = match &self.variant {
            Some(v) => Some(v.iter().map(|s| s.parse::<GaussianVariant>()).collect::<Result<Vec<_>, _>>()?),
            None => None,
        };
        Ok(ConfigOverrides {
            frontier: self.frontier.clone(),
            schedule,
            n: self.n,
            h_prime: self.hprime,
            d_n: self.dn,
            c: self.c,
            replicates: self.replicates,
            seed: self.seed,
            x: (!self.x.is_empty()).then(|| self.x.clone()),
            epsilon: self.epsilon.clone(),
            variants,
            out: self.out.clone(),
            workers: self.workers,
            strict: self.strict.then_some(true),
        })
    }
}

fn write_output(out: Option<&PathBuf>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => fs::write(path, bytes).with_context(|| format!("writing {}", path.display())),
        None => {
            io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

fn run_experiment(name: &str, config: Option<&PathBuf>, flags: &ExperimentFlags) -> Result<bool> {
    let (experiment, mut cfg) = match harness::preset(name) {
        Some(p) => (p.experiment, p.config),
        None => bail!("unknown experiment or preset `{name}`; see `frontier list-presets`"),
    };
    cfg.workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut overrides = ConfigOverrides::default();
    if let Some(path) = config {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        overrides = ConfigOverrides::parse(&text).with_context(|| format!("parsing {}", path.display()))?;
    }
    overrides.merged(flags.overrides()?).apply(&mut cfg);

    let report = experiment.run(&cfg)?;
    let (csv_path, manifest_path) = report.write_to(&cfg.out)?;
    for row in report.failures() {
        println!(
            "FAIL {} {} n={} k_n={} x={} estimate={} comparator={}",
            row.experiment,
            row.statistic,
            row.n,
            row.k_n,
            row.x.map_or("-".into(), |x| x.to_string()),
            row.estimate,
            row.comparator
        );
    }
    println!(
        "{experiment}: {} passed, {} failed, {} reported in {:.2}s",
        report.count(harness::Verdict::Pass),
        report.count(harness::Verdict::Fail),
        report.count(harness::Verdict::Reported),
        report.wall_time_secs
    );
    println!("wrote {} and {}", csv_path.display(), manifest_path.display());
    Ok(report.all_passed() || !cfg.strict)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Simulate { frontier, n, c, seed, out } => {
            let f = FrontierSpec::from_label(&frontier)?;
            let sample = simulate(&f, n, c, seed)?;
            let mut bytes = Vec::new();
            sample.write_csv(&mut bytes)?;
            write_output(out.as_ref(), &bytes)?;
        }
        Command::Estimate { input, hprime, dn, out } => {
            let sample = PointSample::load(&input).with_context(|| format!("reading {}", input.display()))?;
            let cfg = PartitionConfig::new(sample.n, hprime, dn)?;
            let bundle = corrected_estimate(&CellExtremes::from_points(&sample.points, &cfg), &cfg);
            let mut json = bundle.to_json()?;
            json.push('\n');
            write_output(out.as_ref(), json.as_bytes())?;
        }
        Command::Experiment { name, config, flags } => {
            if !run_experiment(&name, config.as_ref(), &flags)? {
                return Ok(ExitCode::from(2));
            }
        }
        Command::ListPresets => {
            let mut out = io::stdout().lock();
            for p in harness::presets() {
                let schedule: Vec<String> = p.config.schedule.iter().map(ToString::to_string).collect();
                let conditions: Vec<&str> = p.experiment.conditions(&p.config).iter().map(|c| c.expression()).collect();
                writeln!(out, "{:<20} {:<11} {}", p.name, p.experiment.name(), p.description)?;
                writeln!(
                    out,
                    "{:<32} frontier={} schedule={} R={} targets: {}",
                    "",
                    p.config.frontier,
                    schedule.join(","),
                    p.config.replicates,
                    if conditions.is_empty() { "none".to_string() } else { conditions.join("; ") }
                )?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
