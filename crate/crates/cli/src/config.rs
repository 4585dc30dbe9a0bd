//! Run-configuration files: schema, validation, and resolution into the
//! core protocol types.

use crate::CliError;
use seqbell_core::montecarlo::SamplePlan;
use seqbell_core::sequence::ProtocolConfig;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// On-disk run configuration. Exactly one of `xis` (explicit strengths) and
/// `schedule_target_g` (per-step guessing target, resolved into strengths)
/// must be present.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    /// Initial state angle θ₁ in radians.
    pub theta1: f64,
    /// Explicit weak-measurement strengths, one per step.
    #[serde(default)]
    pub xis: Option<Vec<f64>>,
    /// Per-step guessing-probability target g* ∈ (1/2, 1).
    #[serde(default)]
    pub schedule_target_g: Option<f64>,
    /// Sequence length; required with a schedule target, otherwise must
    /// match `xis` if given.
    #[serde(default)]
    pub n: Option<usize>,
    /// Per-step probability of the projective z input during sampling.
    #[serde(default)]
    pub gammas: Option<Vec<f64>>,
    /// Visibility grid for the noise sweep emitted by `certify`.
    #[serde(default)]
    pub noise_grid: Option<Vec<f64>>,
    /// Seed for sampling commands.
    #[serde(default)]
    pub seed: Option<u64>,
    /// Output paths; command-line `--out` overrides the primary one.
    #[serde(default)]
    pub output: Option<OutputPaths>,
}

/// Optional output locations named in a config file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    /// Certification report (JSON).
    #[serde(default)]
    pub report_json: Option<PathBuf>,
    /// Per-step table (CSV).
    #[serde(default)]
    pub steps_csv: Option<PathBuf>,
    /// Noise-sweep table (CSV).
    #[serde(default)]
    pub noise_csv: Option<PathBuf>,
    /// Sampled rounds (NDJSON).
    #[serde(default)]
    pub samples_ndjson: Option<PathBuf>,
    /// Correlator estimates (JSON).
    #[serde(default)]
    pub estimates_json: Option<PathBuf>,
}

/// Echo of the fully resolved configuration, embedded in reports so a run
/// can be reproduced without the original file.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    /// Initial state angle.
    pub theta1: f64,
    /// Resolved strengths (explicit or derived from the schedule target).
    pub xis: Vec<f64>,
    /// Sequence length.
    pub n: usize,
    /// Schedule target, when the strengths came from one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule_target_g: Option<f64>,
    /// Seed, when relevant to the command.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Sampling bias, when relevant to the command.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gammas: Option<Vec<f64>>,
}

impl RunConfigFile {
    /// Reads and schema-validates a config file.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))
    }

    /// Resolves into a validated protocol configuration, with an optional
    /// command-line override of the sequence length (schedule mode only).
    pub fn resolve(
        &self,
        n_override: Option<usize>,
    ) -> Result<(ProtocolConfig, ConfigEcho), CliError> {
        let cfg = match (&self.xis, self.schedule_target_g) {
            (Some(_), Some(_)) => {
                return Err(CliError::usage(
                    "config fields `xis` and `schedule_target_g`: exactly one must be present",
                ))
            }
            (None, None) => {
                return Err(CliError::usage(
                    "config field `xis` or `schedule_target_g`: exactly one must be present",
                ))
            }
            (Some(xis), None) => {
                if let Some(n) = self.n {
                    if n != xis.len() {
                        return Err(CliError::usage(format!(
                            "config field `n`: {n} does not match the {} entries of `xis`",
                            xis.len()
                        )));
                    }
                }
                if n_override.is_some() {
                    return Err(CliError::usage(
                        "--n is only meaningful with a schedule target, not explicit `xis`",
                    ));
                }
                ProtocolConfig::new(self.theta1, xis.clone()).map_err(CliError::from_core)?
            }
            (None, Some(target)) => {
                let n = n_override.or(self.n).ok_or_else(|| {
                    CliError::usage("config field `n`: required with `schedule_target_g`")
                })?;
                ProtocolConfig::from_schedule(self.theta1, target, n)
                    .map_err(CliError::from_core)?
            }
        };
        let echo = ConfigEcho {
            theta1: cfg.theta1(),
            xis: cfg.xis().to_vec(),
            n: cfg.n(),
            schedule_target_g: self.schedule_target_g,
            seed: self.seed,
            gammas: self.gammas.clone(),
        };
        Ok((cfg, echo))
    }

    /// Builds the sampling plan for the `sample` command.
    pub fn sample_plan(
        &self,
        cfg: &ProtocolConfig,
        rounds: usize,
        seed_override: Option<u64>,
    ) -> Result<SamplePlan, CliError> {
        let gammas = self.gammas.clone().unwrap_or_else(|| vec![0.1; cfg.n()]);
        let plan = SamplePlan {
            gammas,
            rounds,
            seed: seed_override.or(self.seed).unwrap_or(0),
            alice_level_weights: None,
        };
        Ok(plan)
    }

    /// The configured output paths, or defaults.
    pub fn output(&self) -> OutputPaths {
        self.output.clone().unwrap_or_default()
    }
}

/// Derives a sibling path by replacing the extension-stem suffix, e.g.
/// `report.json` → `report_steps.csv`.
pub fn sibling(path: &Path, suffix: &str, ext: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("output");
    path.with_file_name(format!("{stem}{suffix}.{ext}"))
}
