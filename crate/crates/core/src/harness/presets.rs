//! Named desk-scale configurations. The theorems only constrain growth
//! rates, so each preset fixes concrete `(n, h', d_n)` points and says which
//! conditions it aims at; the run's manifest records the actual ratios.

use super::config::{ExperimentConfig, GaussianVariant, ScheduleEntry};
use super::Experiment;

#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    pub experiment: Experiment,
    pub description: &'static str,
    pub config: ExperimentConfig,
}

fn config(frontier: &str, schedule: &[(u64, u32, u64)], replicates: u64, seed: u64, x: &[f64]) -> ExperimentConfig {
    ExperimentConfig {
        frontier: frontier.to_string(),
        schedule: schedule.iter().map(|&(n, h, d)| ScheduleEntry::new(n, h, d)).collect(),
        replicates,
        seed,
        x: x.to_vec(),
        ..ExperimentConfig::default()
    }
}

pub fn presets() -> Vec<Preset> {
    use Experiment::*;
    let preset = |name, experiment, description, config| Preset { name, experiment, description, config };
    vec![
        preset(
            "cell_law",
            CellLaw,
            "f = 1, n = 200, k_n = 16: empirical law of one cell maximum",
            config("constant:1", &[(200, 4, 1)], 10_000, 11, &[0.5]),
        ),
        preset(
            "cell_law_affine",
            CellLaw,
            "f = 1 + x/2, n = 200, k_n = 16: cell law with a sloped top",
            config("affine:1,0.5", &[(200, 4, 1)], 10_000, 12, &[0.3]),
        ),
        preset(
            "local_bias",
            LocalBias,
            "f = 1 + x/2, n = 1e4, h_n+1 = 16, k_n = 64; k_n ln n/n ~ 0.06",
            config("affine:1,0.5", &[(10_000, 4, 4)], 2000, 21, &[0.3, 0.7]),
        ),
        preset(
            "local_bias_constant",
            LocalBias,
            "f = 1 at the same sizes; the residual has a closed form",
            config("constant:1", &[(10_000, 4, 4)], 2000, 22, &[0.3, 0.7]),
        ),
        preset(
            "variance",
            Variance,
            "f = 1, n = 4096, h_n+1 = 16, k_n = 256",
            config("constant:1", &[(4096, 4, 16)], 5000, 31, &[0.5]),
        ),
        preset(
            "variance_scaling",
            Variance,
            "f = 1, n doubling from 4096 at k_n = 256: variance falls by 4",
            config("constant:1", &[(4096, 4, 16), (8192, 4, 16)], 5000, 32, &[0.5]),
        ),
        preset(
            "mise",
            Mise,
            "f = 1 + x/2, n = 1e4, k_n = 64, h_n+1 doubling 4, 8, 16",
            config("affine:1,0.5", &[(10_000, 2, 16), (10_000, 3, 8), (10_000, 4, 4)], 1000, 41, &[0.5]),
        ),
        preset(
            "mise_rate",
            Mise,
            "f = 1 + x/2, n = 2000 to 128000 with h_n+1 ~ k_n ~ n^(1/2); slope reported",
            config(
                "affine:1,0.5",
                &[(2000, 4, 2), (8000, 5, 2), (32_000, 6, 2), (128_000, 7, 2)],
                400,
                42,
                &[0.5],
            ),
        ),
        preset(
            "supnorm",
            Supnorm,
            "f = 1 + x/2, n = 2000, 8000, 32000 with k_n = 32, 64, 128",
            config("affine:1,0.5", &[(2000, 3, 4), (8000, 4, 4), (32_000, 5, 4)], 500, 51, &[0.5]),
        ),
        preset(
            "supnorm_large_n",
            Supnorm,
            "f = 1, n = 1e5, k_n = 128: exceedances are essentially impossible",
            ExperimentConfig {
                epsilon: vec![0.05, 0.1, 0.2, 1.5],
                ..config("constant:1", &[(100_000, 5, 4)], 500, 52, &[0.5])
            },
        ),
        preset(
            "weibull",
            Weibull,
            "f = 1, d_n = 1, n = 2000, k_n = 512",
            config("constant:1", &[(2000, 9, 1)], 5000, 61, &[0.5]),
        ),
        preset(
            "weibull_trend",
            Weibull,
            "f = 1, d_n = 1, k_n = 512, n = 2000, 4000, 8000: k_n/n shrinking",
            config("constant:1", &[(2000, 9, 1), (4000, 9, 1), (8000, 9, 1)], 5000, 62, &[0.5]),
        ),
        preset(
            "gumbel",
            Gumbel,
            "f = 1, d_n = 1, n = 5e4, k_n = 128",
            config("constant:1", &[(50_000, 7, 1)], 5000, 71, &[0.5]),
        ),
        preset(
            "gaussian",
            Gaussian,
            "f = 1, n = 4096, h_n+1 = 16, d_n = 64 (k_n = 1024); n c/k_n = 4 leaves many empty cells",
            ExperimentConfig {
                variants: GaussianVariant::ALL.to_vec(),
                ..config("constant:1", &[(4096, 4, 64)], 5000, 81, &[0.5])
            },
        ),
        preset(
            "gaussian_regime",
            Gaussian,
            "f = 1, n = 16384, h_n+1 = 16, d_n = 64: n c/k_n = 16, empty cells negligible",
            ExperimentConfig {
                variants: GaussianVariant::ALL.to_vec(),
                ..config("constant:1", &[(16_384, 4, 64)], 5000, 82, &[0.5])
            },
        ),
        preset(
            "zn_moments",
            ZnMoments,
            "f = 1, n = 1e4, k_n = 64",
            config("constant:1", &[(10_000, 4, 4)], 2000, 91, &[0.5]),
        ),
    ]
}

/// Preset by name. An experiment name selects the preset of the same name.
pub fn preset(name: &str) -> Option<Preset> {
    presets().into_iter().find(|p| p.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_experiment_has_a_default_preset() {
        for e in Experiment::ALL {
            let p = preset(e.name()).unwrap_or_else(|| panic!("no preset for {e}"));
            assert_eq!(p.experiment, e);
        }
        for p in presets() {
            p.config.validate().unwrap();
        }
    }
}
