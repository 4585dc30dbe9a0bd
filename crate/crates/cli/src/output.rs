//! Machine-readable outputs: JSON reports, CSV tables, NDJSON sample logs.
//!
//! Every file is written atomically (temp file in the target directory,
//! then rename), numbers are serialized in shortest round-trip form (full
//! double precision), and field orders are fixed, so identical runs produce
//! byte-identical files.

use crate::config::ConfigEcho;
use crate::CliError;
use seqbell_core::montecarlo::{EstimateSet, NoisePoint, RunSample};
use seqbell_core::optimize::SearchReport;
use seqbell_core::sequence::{CertificationReport, StepCertificate};
use serde::Serialize;
use std::io::Write;
use std::path::Path;

/// One per-step row of the certification report, as serialized.
#[derive(Debug, Clone, Serialize)]
pub struct StepRow {
    /// Step number, 1-based.
    pub i: usize,
    /// Branch angle received by the step.
    pub theta: f64,
    /// Weak-measurement strength.
    pub xi: f64,
    /// Observed Bell value.
    pub bell_value: f64,
    /// Maximal quantum value of the step's inequality.
    pub bell_max: f64,
    /// Guessing-probability bound.
    pub g_upper: f64,
    /// Certified min-entropy of the step.
    pub min_entropy_bits: f64,
}

impl From<&StepCertificate> for StepRow {
    fn from(s: &StepCertificate) -> Self {
        Self {
            i: s.index,
            theta: s.theta,
            xi: s.xi,
            bell_value: s.bell_value,
            bell_max: s.bell_max,
            g_upper: s.g_upper,
            min_entropy_bits: s.min_entropy_bits,
        }
    }
}

/// The certification report as written to disk.
#[derive(Debug, Clone, Serialize)]
pub struct ReportFile {
    /// The resolved configuration that produced the report.
    pub config_echo: ConfigEcho,
    /// Per-step certificates.
    pub steps: Vec<StepRow>,
    /// Sum of per-step min-entropies.
    pub total_bits: f64,
    /// Product of per-step guessing bounds.
    pub guess_product: f64,
    /// Caveats attached to the run.
    pub warnings: Vec<String>,
}

impl ReportFile {
    /// Assembles the on-disk report from a core certification result.
    pub fn new(echo: ConfigEcho, report: &CertificationReport) -> Self {
        Self {
            config_echo: echo,
            steps: report.per_step.iter().map(StepRow::from).collect(),
            total_bits: report.total_bits,
            guess_product: report.guess_product,
            warnings: vec![String::from(
                "guess_product multiplies per-step bounds; it is the asymptotic target of the \
                 sequential argument, not a proven finite-length composite bound",
            )],
        }
    }
}

/// The conjecture-verification report as written to disk.
#[derive(Debug, Clone, Serialize)]
pub struct ConjectureFile {
    /// Evaluation budget per grid point.
    pub budget: u64,
    /// Seed of the search.
    pub seed: u64,
    /// One search report per (α, β) grid point.
    pub points: Vec<ConjecturePoint>,
    /// Whether any margin fell below the counterexample threshold.
    pub counterexample_found: bool,
}

/// One grid point of the conjecture verification.
#[derive(Debug, Clone, Serialize)]
pub struct ConjecturePoint {
    /// α of the Bell expression.
    pub alpha: f64,
    /// β of the Bell expression.
    pub beta: f64,
    /// The search outcome.
    pub report: SearchReport,
}

/// Estimates file for the `sample` command.
#[derive(Debug, Clone, Serialize)]
pub struct EstimatesFile {
    /// The resolved configuration.
    pub config_echo: ConfigEcho,
    /// Number of sampled rounds.
    pub rounds: usize,
    /// Per-step correlator estimates.
    pub estimates: Vec<EstimateSet>,
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(d) => tempfile::NamedTempFile::new_in(d),
        None => tempfile::NamedTempFile::new_in("."),
    }
    .map_err(CliError::io)?;
    tmp.write_all(bytes).map_err(CliError::io)?;
    tmp.persist(path)
        .map_err(|e| CliError::io(e.error))
        .map(|_| ())
}

/// Serializes a value as pretty JSON with a trailing newline, atomically.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::io(e.into()))?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

/// Writes the per-step CSV table. Column order is fixed:
/// `step,theta,xi,bell_value,bell_max,g_upper,min_entropy_bits`.
pub fn write_steps_csv(path: &Path, steps: &[StepRow]) -> Result<(), CliError> {
    let mut out = String::from("step,theta,xi,bell_value,bell_max,g_upper,min_entropy_bits\n");
    for s in steps {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            s.i, s.theta, s.xi, s.bell_value, s.bell_max, s.g_upper, s.min_entropy_bits
        ));
    }
    write_atomic(path, out.as_bytes())
}

/// Writes the bound curve. Column order is fixed: `bell_value,g_upper`.
pub fn write_curve_csv(path: &Path, rows: &[(f64, f64)]) -> Result<(), CliError> {
    let mut out = String::from("bell_value,g_upper\n");
    for (i, g) in rows {
        out.push_str(&format!("{i},{g}\n"));
    }
    write_atomic(path, out.as_bytes())
}

/// Writes the noise sweep in long form. Column order is fixed:
/// `visibility,step,bell_value,g_upper,min_entropy_bits,total_bits`.
pub fn write_noise_csv(path: &Path, table: &[NoisePoint]) -> Result<(), CliError> {
    let mut out = String::from("visibility,step,bell_value,g_upper,min_entropy_bits,total_bits\n");
    for point in table {
        for s in &point.per_step {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                point.visibility,
                s.index,
                s.bell_value,
                s.g_upper,
                s.min_entropy_bits,
                point.total_bits
            ));
        }
    }
    write_atomic(path, out.as_bytes())
}

/// Writes sampled rounds as newline-delimited JSON records.
pub fn write_samples_ndjson(path: &Path, samples: &[RunSample]) -> Result<(), CliError> {
    let mut bytes = Vec::new();
    for s in samples {
        serde_json::to_writer(&mut bytes, s).map_err(|e| CliError::io(e.into()))?;
        bytes.push(b'\n');
    }
    write_atomic(path, &bytes)
}
