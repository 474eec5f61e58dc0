//! flowlab: scenario runner for the geometric-flow laboratory.
//!
//! ```text
//! flowlab <scenario> --config <path> [--out <dir>] [--seed <u64>]
//! ```
//!
//! Exit codes: 0 success, 2 validation error, 3 numerical failure.

// Negated comparisons in the validators are NaN-rejecting on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod report;
mod scenarios;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Numerical(m) => m,
        }
    }
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Path to the scenario's JSON configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for the CSV report and JSON summary.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// RNG seed; identical config + seed gives byte-identical reports.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Parser, Debug)]
#[command(name = "flowlab", version, about = "geometric-flow laboratory scenario runner")]
struct Cli {
    #[command(subcommand)]
    scenario: Scenario,
}

#[derive(Subcommand, Debug)]
enum Scenario {
    /// Randomized residual audit of the covariant-calculus identities.
    VerifyIdentities(CommonArgs),
    /// Ambient metric run with optional conjugate-heat solve.
    RunFlow(CommonArgs),
    /// Monotonicity balance records along a run bundle.
    Monotonicity(CommonArgs),
    /// Pointwise Harnack quadratic evaluations.
    Harnack(CommonArgs),
    /// Sign audit of the soliton trace term.
    Solitons(CommonArgs),
}

fn load_config<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("invalid config {}: {e}", path.display())))
}

fn init_threads() {
    // FLOWLAB_THREADS caps internal parallelism; 0 or unset means automatic.
    if let Ok(v) = std::env::var("FLOWLAB_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn run(cli: Cli) -> Result<serde_json::Value, CliError> {
    match &cli.scenario {
        Scenario::VerifyIdentities(a) => {
            let cfg: config::VerifyIdentitiesCfg = load_config(&a.config)?;
            cfg.validate().map_err(CliError::Validation)?;
            scenarios::run_verify_identities(&cfg, &a.out, a.seed)
        }
        Scenario::RunFlow(a) => {
            let cfg: config::RunFlowCfg = load_config(&a.config)?;
            cfg.validate().map_err(CliError::Validation)?;
            scenarios::run_flow(&cfg, &a.out, a.seed)
        }
        Scenario::Monotonicity(a) => {
            let cfg: config::MonotonicityCfg = load_config(&a.config)?;
            cfg.validate().map_err(CliError::Validation)?;
            scenarios::run_monotonicity(&cfg, &a.out, a.seed)
        }
        Scenario::Harnack(a) => {
            let cfg: config::HarnackCfg = load_config(&a.config)?;
            cfg.validate().map_err(CliError::Validation)?;
            scenarios::run_harnack(&cfg, &a.out, a.seed)
        }
        Scenario::Solitons(a) => {
            let cfg: config::SolitonsCfg = load_config(&a.config)?;
            cfg.validate().map_err(CliError::Validation)?;
            scenarios::run_solitons(&cfg, &a.out, a.seed)
        }
    }
}

fn main() {
    init_threads();
    let cli = Cli::parse();
    match run(cli) {
        Ok(summary) => {
            let pass = summary.get("pass").and_then(|v| v.as_bool()).unwrap_or(true);
            println!(
                "{} ({})",
                summary["scenario"].as_str().unwrap_or("scenario"),
                if pass { "pass" } else { "thresholds exceeded" }
            );
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            std::process::exit(e.exit_code());
        }
    }
}
