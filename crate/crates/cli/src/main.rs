//! Command-line front end for the sequential randomness-certification
//! simulator.
//!
//! Subcommands:
//! - `certify` — run the protocol from a config file, write the JSON report
//!   and per-step CSV (plus a noise-sweep CSV when the config has a grid).
//! - `bound-curve` — tabulate the guessing bound against the violation for
//!   a state angle.
//! - `verify-conjecture` — brute-force the quadratic bound over an (α, β)
//!   grid; exits 4 if a counterexample-sized negative margin appears.
//! - `sample` — draw seeded finite statistics and estimate correlators.
//!
//! Exit codes: 0 success, 2 configuration or validation error, 3 numeric
//! infeasibility, 4 conjecture counterexample.

mod config;
mod output;

use clap::{Parser, Subcommand};
use config::{sibling, RunConfigFile};
use seqbell_core::bell::{self, BellParams};
use seqbell_core::montecarlo::{estimate, noise_sweep, sample_runs};
use seqbell_core::optimize::{maximize_lhs, MARGIN_TOL};
use seqbell_core::sequence::certify;
use seqbell_core::Error as CoreError;
use std::f64::consts::FRAC_PI_4;
use std::path::PathBuf;
use std::process::ExitCode;

/// An error carrying the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    /// Configuration or validation problem → exit 2.
    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(2, message)
    }

    /// IO failure → exit 1.
    pub fn io(err: std::io::Error) -> Self {
        Self::new(1, err.to_string())
    }

    /// Counterexample found by the verifier → exit 4.
    pub fn counterexample(message: impl Into<String>) -> Self {
        Self::new(4, message)
    }

    /// Maps core errors: input-shaped problems exit 2, numeric ones exit 3.
    pub fn from_core(err: CoreError) -> Self {
        let code = match err {
            CoreError::InfeasibleBellValue { .. }
            | CoreError::UnderflowExhausted { .. }
            | CoreError::DegenerateBranch { .. } => 3,
            _ => 2,
        };
        Self::new(code, err.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "seqbell",
    about = "Sequential weak-measurement Bell tests: simulation and randomness certification",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the certification pipeline from a config file.
    Certify {
        /// Path to the run configuration (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Report output path (JSON); the per-step CSV lands next to it.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the sequence length of a schedule-target config.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Tabulate the guessing bound over the violation range of a state angle.
    BoundCurve {
        /// State angle θ in radians, in (0, π/4].
        #[arg(long)]
        theta: f64,
        /// Number of rows, endpoints included (≥ 2).
        #[arg(long, default_value_t = 201)]
        samples: usize,
        /// Output CSV path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force check of the quadratic bound over an (alpha, beta) grid.
    VerifyConjecture {
        /// Grid as comma-separated alpha:beta pairs, e.g. "1:0,1.5:1";
        /// defaults to the standard verification grid.
        #[arg(long)]
        grid: Option<String>,
        /// Evaluation budget per grid point.
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        /// Search seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output report path (JSON).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample seeded finite statistics and estimate correlators.
    Sample {
        /// Path to the run configuration (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Number of rounds to sample (≥ 1).
        #[arg(long)]
        samples: usize,
        /// Seed override; falls back to the config seed, then 0.
        #[arg(long)]
        seed: Option<u64>,
        /// Samples output path (NDJSON); estimates land next to it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Certify { config, out, n } => cmd_certify(&config, out, n),
        Command::BoundCurve {
            theta,
            samples,
            out,
        } => cmd_bound_curve(theta, samples, out),
        Command::VerifyConjecture {
            grid,
            budget,
            seed,
            out,
        } => cmd_verify_conjecture(grid.as_deref(), budget, seed, out),
        Command::Sample {
            config,
            samples,
            seed,
            out,
        } => cmd_sample(&config, samples, seed, out),
    }
}

fn cmd_certify(
    config_path: &std::path::Path,
    out: Option<PathBuf>,
    n_override: Option<usize>,
) -> Result<(), CliError> {
    let file = RunConfigFile::load(config_path)?;
    let (cfg, echo) = file.resolve(n_override)?;
    let report = certify(&cfg).map_err(CliError::from_core)?;

    let paths = file.output();
    let report_path = out
        .or(paths.report_json)
        .unwrap_or_else(|| PathBuf::from("seqbell_report.json"));
    let steps_path = paths
        .steps_csv
        .unwrap_or_else(|| sibling(&report_path, "_steps", "csv"));

    let on_disk = output::ReportFile::new(echo, &report);
    output::write_json(&report_path, &on_disk)?;
    output::write_steps_csv(&steps_path, &on_disk.steps)?;

    if let Some(grid) = &file.noise_grid {
        let table = noise_sweep(&cfg, grid).map_err(CliError::from_core)?;
        let noise_path = paths
            .noise_csv
            .unwrap_or_else(|| sibling(&report_path, "_noise", "csv"));
        output::write_noise_csv(&noise_path, &table)?;
        println!(
            "noise sweep: {} points -> {}",
            grid.len(),
            noise_path.display()
        );
    }

    println!(
        "certified {:.6} bits over {} steps (single-round cap for a qubit pair: 4 bits)",
        report.total_bits,
        cfg.n()
    );
    println!("report -> {}", report_path.display());
    println!("steps  -> {}", steps_path.display());
    Ok(())
}

fn cmd_bound_curve(theta: f64, samples: usize, out: Option<PathBuf>) -> Result<(), CliError> {
    if !(theta > 0.0 && theta <= FRAC_PI_4) {
        return Err(CliError::usage(format!(
            "--theta {theta} outside (0, pi/4]"
        )));
    }
    if samples < 2 {
        return Err(CliError::usage("--samples must be at least 2"));
    }
    let beta = bell::beta_of_theta(theta).map_err(CliError::from_core)?;
    let params = BellParams::new(1.0, beta).map_err(CliError::from_core)?;
    let lo = params.classical_bound();
    let hi = bell::max_quantum_value(&params);
    let mut rows = Vec::with_capacity(samples);
    for k in 0..samples {
        // Endpoints are pinned exactly; interior points interpolate.
        let i = if k == 0 {
            lo
        } else if k == samples - 1 {
            hi
        } else {
            lo + (hi - lo) * k as f64 / (samples - 1) as f64
        };
        let bound = bell::guessing_bound(i, &params).map_err(CliError::from_core)?;
        rows.push((i, bound.g_upper));
    }
    let path = out.unwrap_or_else(|| PathBuf::from("bound_curve.csv"));
    output::write_curve_csv(&path, &rows)?;
    println!(
        "bound curve for theta = {theta}: {} rows over [{lo}, {hi}] -> {}",
        rows.len(),
        path.display()
    );
    Ok(())
}

fn default_grid() -> Result<Vec<(f64, f64)>, CliError> {
    let beta_pi_16 =
        bell::beta_of_theta(std::f64::consts::PI / 16.0).map_err(CliError::from_core)?;
    Ok(vec![
        (1.0, 0.0),
        (1.0, 2.0 / 3.0_f64.sqrt()),
        (1.0, beta_pi_16),
        (1.5, 1.0),
    ])
}

fn parse_grid(spec: &str) -> Result<Vec<(f64, f64)>, CliError> {
    let mut grid = Vec::new();
    for part in spec.split(',') {
        let (a, b) = part
            .split_once(':')
            .ok_or_else(|| CliError::usage(format!("grid entry `{part}`: expected alpha:beta")))?;
        let alpha: f64 = a
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("grid entry `{part}`: bad alpha")))?;
        let beta: f64 = b
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("grid entry `{part}`: bad beta")))?;
        grid.push((alpha, beta));
    }
    if grid.is_empty() {
        return Err(CliError::usage("empty grid"));
    }
    Ok(grid)
}

fn cmd_verify_conjecture(
    grid_spec: Option<&str>,
    budget: u64,
    seed: u64,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let grid = match grid_spec {
        Some(spec) => parse_grid(spec)?,
        None => default_grid()?,
    };
    // Validate the whole grid before burning budget on any point.
    let mut params = Vec::with_capacity(grid.len());
    for &(alpha, beta) in &grid {
        params.push(BellParams::new(alpha, beta).map_err(CliError::from_core)?);
    }

    let mut points = Vec::with_capacity(params.len());
    let mut worst: Option<(f64, f64, f64)> = None;
    for p in &params {
        let report = maximize_lhs(p, budget, seed).map_err(CliError::from_core)?;
        println!(
            "alpha = {:<6} beta = {:<20} best = {:<22} margin = {:+.3e} ({} evals{})",
            p.alpha(),
            p.beta(),
            report.best_value,
            report.margin,
            report.evaluations,
            if report.converged {
                ""
            } else {
                ", not converged"
            }
        );
        if worst.is_none_or(|(_, _, m)| report.margin < m) {
            worst = Some((p.alpha(), p.beta(), report.margin));
        }
        points.push(output::ConjecturePoint {
            alpha: p.alpha(),
            beta: p.beta(),
            report,
        });
    }

    let counterexample = worst.map(|(_, _, m)| m < MARGIN_TOL).unwrap_or(false);
    let file = output::ConjectureFile {
        budget,
        seed,
        points,
        counterexample_found: counterexample,
    };
    let path = out.unwrap_or_else(|| PathBuf::from("conjecture_report.json"));
    output::write_json(&path, &file)?;
    println!("report -> {}", path.display());

    if counterexample {
        let (alpha, beta, margin) = worst.expect("worst set when counterexample found");
        return Err(CliError::counterexample(format!(
            "conjecture violated at alpha = {alpha}, beta = {beta}: margin = {margin:e}"
        )));
    }
    Ok(())
}

fn cmd_sample(
    config_path: &std::path::Path,
    rounds: usize,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    if rounds == 0 {
        return Err(CliError::usage("--samples must be at least 1"));
    }
    let file = RunConfigFile::load(config_path)?;
    let (cfg, mut echo) = file.resolve(None)?;
    let plan = file.sample_plan(&cfg, rounds, seed)?;
    echo.seed = Some(plan.seed);
    echo.gammas = Some(plan.gammas.clone());

    let samples = sample_runs(&cfg, &plan).map_err(CliError::from_core)?;
    let mut estimates = Vec::with_capacity(cfg.n());
    for step in 1..=cfg.n() {
        estimates.push(estimate(&samples, step).map_err(CliError::from_core)?);
    }

    let paths = file.output();
    let samples_path = out
        .or(paths.samples_ndjson)
        .unwrap_or_else(|| PathBuf::from("seqbell_samples.ndjson"));
    let estimates_path = paths
        .estimates_json
        .unwrap_or_else(|| sibling(&samples_path, "_estimates", "json"));

    output::write_samples_ndjson(&samples_path, &samples)?;
    let est_file = output::EstimatesFile {
        config_echo: echo,
        rounds,
        estimates,
    };
    output::write_json(&estimates_path, &est_file)?;

    let flagged = est_file.estimates.iter().filter(|e| e.low_stats).count();
    println!(
        "{rounds} rounds sampled; {} steps estimated ({flagged} low-stats)",
        est_file.estimates.len()
    );
    println!("samples   -> {}", samples_path.display());
    println!("estimates -> {}", estimates_path.display());
    Ok(())
}
