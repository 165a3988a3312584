use crate::error::{Error, Result};
use crate::estimators::{corrected_kernel_eval, haar_ev_estimate, minima_mean};
use crate::frontier::FrontierSpec;
use crate::haar::truncated_expansion;
use crate::oracles::{ks_statistic, normalizations, Cdf, CellLaw, LimitLaw};
use crate::partition::PartitionConfig;
use crate::process::{simulate_extremes, CellExtremes};

use super::config::{ExperimentConfig, GaussianVariant};
use super::metrics::{error_metrics, log_log_slope, median, Summary};
use super::report::{Check, ReportRow, RowContext};
use super::runner::{replicate_stream, run_replicates};

/// Asymptotic 1% critical value of the Kolmogorov distribution.
const KOLMOGOROV_1PCT: f64 = 1.6276;
/// Asymptotic 5% critical value of the Kolmogorov distribution.
const KOLMOGOROV_5PCT: f64 = 1.3581;
/// Tolerance for two algebraically equal formulas of one statistic.
const FORMULA_TOL: f64 = 1e-12;
const WEIBULL_KS_TOL: f64 = 0.03;
const GUMBEL_KS_TOL: f64 = 0.03;
const GAUSSIAN_KS_TOL: f64 = 0.05;

pub(crate) struct Run<'a> {
    pub name: &'static str,
    pub cfg: &'a ExperimentConfig,
    pub f: &'a FrontierSpec,
}

impl Run<'_> {
    fn context(&self, p: &PartitionConfig) -> RowContext {
        RowContext {
            experiment: self.name,
            frontier: self.cfg.frontier.clone(),
            c: self.cfg.c,
            partition: *p,
        }
    }

    fn nc(&self, p: &PartitionConfig) -> f64 {
        p.n() as f64 * self.cfg.c
    }

    /// Simulates every replicate of schedule entry `entry` and maps it
    /// through `job`, in replicate order.
    fn replicates<T, F>(&self, entry: usize, p: &PartitionConfig, job: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(&CellExtremes) -> Result<T> + Sync + Send,
    {
        let cfg = self.cfg;
        run_replicates(cfg.workers, cfg.replicates, |rep| {
            let cells = simulate_extremes(self.f, p, cfg.c, cfg.seed, replicate_stream(entry, rep))?;
            job(&cells)
        })
    }

    fn partitions(&self) -> Result<Vec<PartitionConfig>> {
        self.cfg.schedule.iter().map(|e| e.partition()).collect()
    }

    fn r(&self) -> f64 {
        self.cfg.replicates as f64
    }

    /// Exact mean and variance of `f̂_n(x)`: the block average of
    /// independent cell maxima.
    fn exact_block_moments(&self, p: &PartitionConfig, x: f64) -> Result<(f64, f64)> {
        let d = p.d_n() as f64;
        let (mut mean, mut var) = (0.0, 0.0);
        for r in p.cells_in_block(p.block_index(x)) {
            let law = CellLaw::new(self.f, p, r, self.cfg.c)?;
            mean += law.mean()?;
            var += law.variance()?;
        }
        Ok((mean / d, var / (d * d)))
    }
}

fn column(samples: &[Vec<f64>], j: usize) -> Vec<f64> {
    samples.iter().map(|s| s[j]).collect()
}

fn f_hat_at(cells: &CellExtremes, p: &PartitionConfig, xs: &[f64]) -> Vec<f64> {
    let est = haar_ev_estimate(cells, p);
    xs.iter().map(|&x| est.eval(x)).collect()
}

/// `cdf(offset + scale * t)`: the law of `(X - offset) / scale`.
struct Rescaled<'a, C> {
    inner: &'a C,
    offset: f64,
    scale: f64,
}

impl<C: Cdf> Cdf for Rescaled<'_, C> {
    fn cdf(&self, t: f64) -> Result<f64> {
        self.inner.cdf(self.offset + self.scale * t)
    }

    fn cdf_left(&self, t: f64) -> Result<f64> {
        self.inner.cdf_left(self.offset + self.scale * t)
    }
}

/// Law of the normalised maximal deviation `(nc/k) max_r (M_r - X*_r) -
/// ln k`: a product over independent cells.
struct MaxDeviationLaw<'a> {
    cells: Vec<CellLaw<'a>>,
    scale: f64,
    ln_k: f64,
}

impl MaxDeviationLaw<'_> {
    fn product(&self, u: f64, left: bool) -> Result<f64> {
        let t = (u + self.ln_k) / self.scale;
        let mut prod = 1.0;
        for law in &self.cells {
            // P(M - X <= t) = 1 - P(X < M - t); the left limit swaps the
            // inequalities.
            let level = law.upper() - t;
            let below = if left { law.cdf(level)? } else { law.cdf_left(level)? };
            prod *= 1.0 - below;
        }
        Ok(prod)
    }
}

impl Cdf for MaxDeviationLaw<'_> {
    fn cdf(&self, u: f64) -> Result<f64> {
        self.product(u, false)
    }

    fn cdf_left(&self, u: f64) -> Result<f64> {
        self.product(u, true)
    }
}

/// Sup distance between two laws on a grid, both one-sided limits taken.
fn grid_distance(a: &impl Cdf, b: &impl Cdf, lo: f64, hi: f64, points: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for j in 0..=points {
        let t = lo + (hi - lo) * j as f64 / points as f64;
        worst = worst
            .max((a.cdf(t)? - b.cdf(t)?).abs())
            .max((a.cdf_left(t)? - b.cdf_left(t)?).abs());
    }
    Ok(worst)
}

pub(crate) fn cell_law(run: &Run) -> Result<Vec<ReportRow>> {
    let xs = &run.cfg.x;
    let ks_tol = KOLMOGOROV_1PCT / run.r().sqrt();
    let mut rows = Vec::new();
    for (i, p) in run.partitions()?.iter().enumerate() {
        let ctx = run.context(p);
        let cells: Vec<usize> = xs.iter().map(|&x| p.cell_index(x)).collect();
        let samples = run.replicates(i, p, |e| Ok(cells.iter().map(|&r| e.x_star[r]).collect()))?;
        for (j, (&x, &r)) in xs.iter().zip(&cells).enumerate() {
            let law = CellLaw::new(run.f, p, r, run.cfg.c)?;
            let values = column(&samples, j);
            let s = Summary::of(&values);
            let ks = ks_statistic(&values, &law)?;
            rows.push(ctx.row(Some(x), "ks_vs_cell_law", "cell_cdf", ks, f64::NAN, 0.0, Check::Within(ks_tol)));
            let mean = law.mean()?;
            rows.push(ctx.row(Some(x), "mean_x_star", "cell_max_mean", s.mean, s.mean_se, mean, Check::Within(3.0 * s.mean_se)));
            let var = law.variance()?;
            rows.push(ctx.row(
                Some(x),
                "variance_x_star",
                "cell_max_variance",
                s.variance,
                s.variance_se,
                var,
                Check::Within(3.0 * s.variance_se),
            ));
            let empty = values.iter().filter(|&&v| v == 0.0).count() as f64 / run.r();
            let p0 = law.empty_probability();
            let se = (p0 * (1.0 - p0) / run.r()).sqrt();
            // One count of continuity slack: the event can be very rare.
            let tol = 3.0 * se + 1.0 / run.r();
            rows.push(ctx.row(Some(x), "empty_fraction", "exp(-n c lambda_r)", empty, se, p0, Check::Within(tol)));
        }
    }
    Ok(rows)
}

pub(crate) fn local_bias(run: &Run) -> Result<Vec<ReportRow>> {
    let xs = &run.cfg.x;
    let mut rows = Vec::new();
    for (i, p) in run.partitions()?.iter().enumerate() {
        let ctx = run.context(p);
        let projection = truncated_expansion(run.f, p.h_n())?;
        let shift = p.k_n() as f64 / run.nc(p);
        let samples = run.replicates(i, p, |e| Ok(f_hat_at(e, p, xs)))?;
        for (j, &x) in xs.iter().enumerate() {
            let s = Summary::of(&column(&samples, j));
            let fn_x = projection.eval(x);
            let (exact_mean, _) = run.exact_block_moments(p, x)?;
            rows.push(ctx.row(
                Some(x),
                "mean_f_hat",
                "block mean of cell_max_mean",
                s.mean,
                s.mean_se,
                exact_mean,
                Check::Within(3.0 * s.mean_se),
            ));
            let residual = s.mean - fn_x + shift;
            let (oracle, comparator, check) = if run.f.is_constant() {
                ("closed-form constant frontier", exact_mean - fn_x + shift, Check::Within(3.0 * s.mean_se))
            } else if let Some(lip) = run.f.lipschitz() {
                let bound = (p.k_n() as f64).powf(-lip.alpha);
                ("k_n^-alpha bound", 0.0, Check::Within(bound + 3.0 * s.mean_se))
            } else {
                ("none (frontier not Lipschitz)", 0.0, Check::Reported)
            };
            rows.push(ctx.row(Some(x), "bias_residual", oracle, residual, s.mean_se, comparator, check));
            rows.push(ctx.row(Some(x), "raw_bias_negative", "sign", s.mean - fn_x, s.mean_se, 0.0, Check::AtMost(0.0)));
        }
    }
    Ok(rows)
}

pub(crate) fn variance(run: &Run) -> Result<Vec<ReportRow>> {
    let xs = &run.cfg.x;
    let mut rows = Vec::new();
    let mut previous: Option<(PartitionConfig, Vec<Summary>)> = None;
    for (i, p) in run.partitions()?.iter().enumerate() {
        let ctx = run.context(p);
        let nc = run.nc(p);
        let k = p.k_n() as f64;
        let (comparator, oracle) = if p.d_n() == 1 {
            (k * k / (nc * nc), "k_n^2/(n c)^2")
        } else {
            (k * p.h_n() as f64 / (nc * nc), "k_n h_n/(n c)^2")
        };
        let samples = run.replicates(i, p, |e| Ok(f_hat_at(e, p, xs)))?;
        let summaries: Vec<Summary> = (0..xs.len()).map(|j| Summary::of(&column(&samples, j))).collect();
        for (j, &x) in xs.iter().enumerate() {
            let s = summaries[j];
            rows.push(ctx.row(
                Some(x),
                "variance_ratio",
                oracle,
                s.variance / comparator,
                s.variance_se / comparator,
                1.0,
                Check::Within(0.2),
            ));
            let (_, exact) = run.exact_block_moments(p, x)?;
            rows.push(ctx.row(
                Some(x),
                "variance_vs_exact",
                "block average of cell_max_variance",
                s.variance,
                s.variance_se,
                exact,
                Check::Within(3.0 * s.variance_se),
            ));
            if let Some((prev_p, prev)) = &previous {
                if prev_p.h_n() == p.h_n() && prev_p.k_n() == p.k_n() && prev_p.n() != p.n() {
                    let expected = (p.n() as f64 / prev_p.n() as f64).powi(2);
                    let ratio = prev[j].variance / s.variance;
                    let se = ratio
                        * ((prev[j].variance_se / prev[j].variance).powi(2) + (s.variance_se / s.variance).powi(2)).sqrt();
                    rows.push(ctx.row(
                        Some(x),
                        "variance_scaling",
                        "(n_new/n_old)^2",
                        ratio,
                        se,
                        expected,
                        Check::Within(0.2 * expected),
                    ));
                }
            }
        }
        previous = Some((*p, summaries));
    }
    Ok(rows)
}

pub(crate) fn mise(run: &Run) -> Result<Vec<ReportRow>> {
    let mut rows = Vec::new();
    let mut previous_systematic: Option<(u64, f64)> = None;
    let mut rate_points = Vec::new();
    let mut bound_points = Vec::new();
    let alpha = run.f.lipschitz().map_or(1.0, |l| l.alpha);
    let partitions = run.partitions()?;
    for (i, p) in partitions.iter().enumerate() {
        let ctx = run.context(p);
        let projection = truncated_expansion(run.f, p.h_n())?;
        let systematic = error_metrics(&projection, run.f, &[])?.l2.powi(2);
        let samples = run.replicates(i, p, |e| {
            let est = haar_ev_estimate(e, p);
            let mut total = 0.0;
            for (a, b, v) in est.pieces() {
                total += run.f.squared_distance_to_constant(a, b, v)?;
            }
            Ok(vec![total, est.l2_distance_squared(&projection)])
        })?;
        let j = Summary::of(&column(&samples, 0));
        let stochastic = Summary::of(&column(&samples, 1));

        // E‖f̂ - f_n‖² = Σ_blocks width · (Var f̂_l + (E f̂_l - f_n,l)²).
        let width = 1.0 / p.blocks() as f64;
        let mut exact_stochastic = 0.0;
        for l in 0..p.blocks() {
            let centre = (l as f64 + 0.5) * width;
            let (mean, var) = run.exact_block_moments(p, centre)?;
            exact_stochastic += width * (var + (mean - projection.eval(centre)).powi(2));
        }

        let nc = run.nc(p);
        let k = p.k_n() as f64;
        let bound = (k / nc).powi(2) + k.powf(-2.0 * alpha);
        rows.push(ctx.row(None, "mise", "order k_n^2/(nc)^2 + k_n^(-2 alpha)", j.mean, j.mean_se, bound, Check::Reported));
        rows.push(ctx.row(
            None,
            "mise_stochastic",
            "cell law moments",
            stochastic.mean,
            stochastic.mean_se,
            exact_stochastic,
            Check::Within(3.0 * stochastic.mean_se),
        ));
        let (oracle, comparator, check) = match run.f.lipschitz() {
            Some(lip) => ("(L (h_n+1)^-alpha)^2", lip.modulus(width).powi(2), Check::AtMost(0.0)),
            None => ("none (frontier not Lipschitz)", f64::NAN, Check::Reported),
        };
        rows.push(ctx.row(None, "mise_systematic", oracle, systematic, 0.0, comparator, check));
        rows.push(ctx.row(
            None,
            "orthogonality_residual",
            "J = stochastic + systematic",
            j.mean - stochastic.mean - systematic,
            j.mean_se,
            0.0,
            Check::Within(3.0 * j.mean_se),
        ));
        if let Some((prev_blocks, prev_sys)) = previous_systematic {
            if p.blocks() as u64 == 2 * prev_blocks && systematic > 0.0 && run.f.lipschitz().is_some() {
                let expected = 4f64.powf(alpha);
                rows.push(ctx.row(
                    None,
                    "systematic_ratio",
                    "2^(2 alpha)",
                    prev_sys / systematic,
                    0.0,
                    expected,
                    Check::Within(0.125 * expected),
                ));
            }
        }
        previous_systematic = Some((p.blocks() as u64, systematic));
        rate_points.push((p.n() as f64, j.mean));
        bound_points.push((p.n() as f64, bound));
    }
    if let (Some(slope), Some(expected)) = (log_log_slope(&rate_points), log_log_slope(&bound_points)) {
        let ctx = run.context(partitions.last().expect("schedule is not empty"));
        rows.push(ctx.row(None, "mise_rate_slope", "slope of the order bound", slope, f64::NAN, expected, Check::Reported));
    }
    Ok(rows)
}

pub(crate) fn supnorm(run: &Run) -> Result<Vec<ReportRow>> {
    let mut rows = Vec::new();
    let mut previous: Option<(u64, Vec<f64>)> = None;
    let r = run.r();
    for (i, p) in run.partitions()?.iter().enumerate() {
        let ctx = run.context(p);
        let sups = run.replicates(i, p, |e| Ok(error_metrics(&haar_ev_estimate(e, p), run.f, &[])?.sup))?;
        let k = p.k_n() as f64;
        let mut probs = Vec::new();
        for &eps in &run.cfg.epsilon {
            let prob = sups.iter().filter(|&&s| s > eps).count() as f64 / r;
            let se = (prob * (1.0 - prob) / r).sqrt();
            let name = format!("p_sup_gt_{eps}");
            let tail = (k * (-run.nc(p) * eps / (2.0 * k)).exp()).min(1.0);
            if eps >= run.f.upper() {
                rows.push(ctx.row(None, name, "estimate and f lie in [0, M]", prob, se, 0.0, Check::Within(0.0)));
            } else if run.f.is_constant() {
                rows.push(ctx.row(None, name, "k_n exp(-n c eps/(2 k_n))", prob, se, tail, Check::AtMost(3.0 * se)));
            } else {
                rows.push(ctx.row(None, name, "k_n exp(-n c eps/(2 k_n))", prob, se, tail, Check::Reported));
            }
            if let Some((prev_n, prev)) = &previous {
                if p.n() > *prev_n {
                    let before = prev[probs.len()];
                    let pooled = (before * (1.0 - before) / r + se * se).sqrt();
                    rows.push(ctx.row(
                        None,
                        format!("p_sup_gt_{eps}_nonincreasing"),
                        "previous schedule entry",
                        prob,
                        se,
                        before,
                        Check::AtMost(3.0 * pooled + 1.0 / r),
                    ));
                }
            }
            probs.push(prob);
        }
        let s = Summary::of(&sups);
        rows.push(ctx.row(None, "mean_sup_error", "none", s.mean, s.mean_se, f64::NAN, Check::Reported));
        previous = Some((p.n(), probs));
    }
    Ok(rows)
}

pub(crate) fn weibull(run: &Run) -> Result<Vec<ReportRow>> {
    let xs = &run.cfg.x;
    let mut rows = Vec::new();
    let mut previous: Option<(f64, Vec<f64>)> = None;
    let exact_tol = KOLMOGOROV_1PCT / run.r().sqrt();
    for (i, p) in run.partitions()?.iter().enumerate() {
        if p.d_n() != 1 {
            return Err(Error::RequiresUnitBlock(p.d_n()));
        }
        let ctx = run.context(p);
        let norms = xs
            .iter()
            .map(|&x| normalizations(run.f, p, run.cfg.c, x))
            .collect::<Result<Vec<_>>>()?;
        let samples = run.replicates(i, p, |e| {
            let est = haar_ev_estimate(e, p);
            Ok(xs
                .iter()
                .zip(&norms)
                .flat_map(|(&x, z)| [z.weibull_statistic(est.eval(x)), z.weibull_statistic(e.x_star[z.cell])])
                .collect())
        })?;
        let mut ks_values = Vec::new();
        for (j, (&x, z)) in xs.iter().zip(&norms).enumerate() {
            let via_estimate = column(&samples, 2 * j);
            let via_max = column(&samples, 2 * j + 1);
            let gap = via_estimate.iter().zip(&via_max).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            rows.push(ctx.row(Some(x), "formulation_gap", "T_n from X* directly", gap, 0.0, 0.0, Check::Within(FORMULA_TOL)));

            let ks = ks_statistic(&via_estimate, &LimitLaw::WeibullEvd)?;
            rows.push(ctx.row(Some(x), "ks_vs_weibull_evd", "min(e^u, 1)", ks, f64::NAN, 0.0, Check::Within(WEIBULL_KS_TOL)));

            let law = CellLaw::new(run.f, p, z.cell, run.cfg.c)?;
            let exact = Rescaled { inner: &law, offset: z.k_lambda, scale: 1.0 / z.scale };
            let ks_exact = ks_statistic(&via_estimate, &exact)?;
            rows.push(ctx.row(Some(x), "ks_vs_exact_law", "cell_cdf rescaled", ks_exact, f64::NAN, 0.0, Check::Within(exact_tol)));

            let lowest = -z.scale * z.k_lambda;
            let highest = z.weibull_statistic(law.upper());
            let distance = grid_distance(&exact, &LimitLaw::WeibullEvd, lowest, highest.max(0.0), 4000)?;
            rows.push(ctx.row(Some(x), "exact_law_distance_to_limit", "cell_cdf vs min(e^u, 1)", distance, 0.0, 0.0, Check::Reported));

            let s = Summary::of(&via_estimate);
            rows.push(ctx.row(Some(x), "max_t_n", "(n c / k_n)(M_r - k_n lambda_r)", s.max, 0.0, highest, Check::AtMost(FORMULA_TOL)));

            if let Some((prev_ratio, prev)) = &previous {
                let ratio = p.k_n() as f64 / p.n() as f64;
                if ratio < *prev_ratio {
                    rows.push(ctx.row(
                        Some(x),
                        "ks_nonincreasing",
                        "previous schedule entry",
                        ks,
                        f64::NAN,
                        prev[j],
                        Check::AtMost(KOLMOGOROV_5PCT / run.r().sqrt()),
                    ));
                }
            }
            ks_values.push(ks);
        }
        previous = Some((p.k_n() as f64 / p.n() as f64, ks_values));
    }
    Ok(rows)
}

pub(crate) fn gumbel(run: &Run) -> Result<Vec<ReportRow>> {
    let mut rows = Vec::new();
    let partitions = run.partitions()?;
    let largest = partitions.iter().map(|p| p.n()).max().unwrap_or(0);
    let exact_tol = KOLMOGOROV_1PCT / run.r().sqrt();
    for (i, p) in partitions.iter().enumerate() {
        if p.d_n() != 1 {
            return Err(Error::RequiresUnitBlock(p.d_n()));
        }
        let ctx = run.context(p);
        let z = normalizations(run.f, p, run.cfg.c, 0.5)?;
        let laws = (0..p.cells())
            .map(|r| CellLaw::new(run.f, p, r, run.cfg.c))
            .collect::<Result<Vec<_>>>()?;
        let tops: Vec<f64> = laws.iter().map(CellLaw::upper).collect();
        let samples = run.replicates(i, p, |e| {
            let direct = e.x_star.iter().zip(&tops).map(|(x, m)| m - x).fold(f64::NEG_INFINITY, f64::max);
            // sup over each cell of |f̂_n - M_r|; f̂_n is constant per cell
            // when d_n = 1.
            let est = haar_ev_estimate(e, p);
            let via_estimate = est.values().iter().zip(&tops).map(|(v, m)| (v - m).abs()).fold(f64::NEG_INFINITY, f64::max);
            Ok(vec![direct, z.gumbel_statistic(direct), z.gumbel_statistic(via_estimate)])
        })?;
        let raw = column(&samples, 0);
        let normalized = column(&samples, 1);
        let via_estimate = column(&samples, 2);
        let gap = normalized.iter().zip(&via_estimate).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        rows.push(ctx.row(None, "formulation_gap", "sup |f_hat - M_r| over cells", gap, 0.0, 0.0, Check::Within(FORMULA_TOL)));
        let lowest = Summary::of(&raw).min;
        rows.push(ctx.row(None, "min_raw_statistic", "X* <= M_r", lowest, 0.0, 0.0, Check::AtLeast(0.0)));

        let ks = ks_statistic(&normalized, &LimitLaw::Gumbel)?;
        rows.push(ctx.row(None, "ks_vs_gumbel", "exp(-e^-u)", ks, f64::NAN, 0.0, Check::Within(GUMBEL_KS_TOL)));
        let exact = MaxDeviationLaw { cells: laws, scale: z.scale, ln_k: z.ln_k };
        let ks_exact = ks_statistic(&normalized, &exact)?;
        rows.push(ctx.row(None, "ks_vs_exact_law", "product of cell_cdf", ks_exact, f64::NAN, 0.0, Check::Within(exact_tol)));
        let distance = grid_distance(&exact, &LimitLaw::Gumbel, -z.ln_k, 10.0, 4000)?;
        rows.push(ctx.row(None, "exact_law_distance_to_limit", "product of cell_cdf vs exp(-e^-u)", distance, 0.0, 0.0, Check::Reported));

        let med = median(&normalized);
        let gumbel_median = -(2f64.ln().ln());
        let check = if p.n() == largest { Check::Within(0.1) } else { Check::Reported };
        rows.push(ctx.row(None, "median_normalized", "-ln ln 2", med, f64::NAN, gumbel_median, check));
    }
    Ok(rows)
}

pub(crate) fn gaussian(run: &Run) -> Result<Vec<ReportRow>> {
    let xs = &run.cfg.x;
    let mut rows = Vec::new();
    let r = run.r();
    for (i, p) in run.partitions()?.iter().enumerate() {
        if p.d_n() == 1 {
            return Err(Error::RequiresCoarseBlocks);
        }
        let ctx = run.context(p);
        let shift = p.k_n() as f64 / run.nc(p);
        let samples = run.replicates(i, p, |e| {
            let z_n = minima_mean(e);
            let est = haar_ev_estimate(e, p);
            let mut out = vec![z_n];
            for &x in xs {
                let f_hat = est.eval(x);
                out.push(f_hat);
                out.push((corrected_kernel_eval(e, p, x) - (f_hat + z_n)).abs());
            }
            Ok(out)
        })?;
        let z_n = column(&samples, 0);
        for (j, &x) in xs.iter().enumerate() {
            let norm = normalizations(run.f, p, run.cfg.c, x)?;
            let f_x = run.f.eval(x);
            let f_hat = column(&samples, 1 + 2 * j);
            let gap = column(&samples, 2 + 2 * j).into_iter().fold(0.0, f64::max);
            rows.push(ctx.row(Some(x), "formulation_gap", "f_tilde by its kernel sum", gap, 0.0, 0.0, Check::Within(FORMULA_TOL)));

            let grand_mean = Summary::of(&f_hat).mean;
            for variant in &run.cfg.variants {
                let v: Vec<f64> = match variant {
                    GaussianVariant::Centered => f_hat.iter().map(|&y| norm.standardize(y, grand_mean)).collect(),
                    GaussianVariant::OracleCorrected => f_hat.iter().map(|&y| norm.standardize(y + shift, f_x)).collect(),
                    GaussianVariant::ZCorrected => {
                        f_hat.iter().zip(&z_n).map(|(&y, &z)| norm.standardize(y + z, f_x)).collect()
                    }
                };
                let name = variant.name();
                let ks = ks_statistic(&v, &LimitLaw::StdNormal)?;
                rows.push(ctx.row(Some(x), format!("ks_vs_std_normal_{name}"), "Phi", ks, f64::NAN, 0.0, Check::Within(GAUSSIAN_KS_TOL)));
                let s = Summary::of(&v);
                rows.push(ctx.row(Some(x), format!("mean_{name}"), "0", s.mean, s.mean_se, 0.0, Check::Within(3.0 / r.sqrt())));
            }

            let raw: Vec<f64> = f_hat.iter().map(|&y| norm.standardize(y, f_x)).collect();
            let s = Summary::of(&raw);
            rows.push(ctx.row(Some(x), "uncorrected_mean", "divergence threshold -2", s.mean, s.mean_se, -2.0, Check::AtMost(0.0)));
            let (exact_mean, _) = run.exact_block_moments(p, x)?;
            rows.push(ctx.row(
                Some(x),
                "uncorrected_mean_vs_exact",
                "block mean of cell_max_mean",
                s.mean,
                s.mean_se,
                norm.standardize(exact_mean, f_x),
                Check::Within(3.0 * s.mean_se),
            ));
        }
    }
    Ok(rows)
}

pub(crate) fn zn_moments(run: &Run) -> Result<Vec<ReportRow>> {
    let mut rows = Vec::new();
    for (i, p) in run.partitions()?.iter().enumerate() {
        let ctx = run.context(p);
        let nc = run.nc(p);
        let k = p.k_n() as f64;
        let values = run.replicates(i, p, |e| Ok(minima_mean(e)))?;
        let s = Summary::of(&values);
        rows.push(ctx.row(None, "zn_mean", "k_n/(n c)", s.mean, s.mean_se, k / nc, Check::Within(3.0 * s.mean_se)));
        let comparator = k / (nc * nc);
        rows.push(ctx.row(
            None,
            "zn_variance_ratio",
            "k_n/(n c)^2",
            s.variance / comparator,
            s.variance_se / comparator,
            1.0,
            Check::Within(0.2),
        ));
        rows.push(ctx.row(None, "zn_min", "minima are nonnegative", s.min, 0.0, 0.0, Check::AtLeast(0.0)));
    }
    Ok(rows)
}
