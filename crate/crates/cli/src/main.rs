//! `qloc` — command-line front end for the location-verification
//! simulator. Loads a JSON experiment configuration, runs it with
//! deterministic seeding, and writes a JSON report or CSV rows.
//!
//! Exit codes: 0 on success (for `verify`, additionally: every trial
//! verified), 1 for runtime failures or a rejected verification, 2 for
//! configuration and usage errors.

mod config;
mod runner;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{load_config, ExperimentConfig, ExperimentKind, OutputFormat};
use crate::runner::{run_experiment, run_sweep, write_output};

/// A failed invocation, split by whose fault it is: bad input (exit 2)
/// versus a failure while running (exit 1).
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Runtime(String),
}

#[derive(Debug, Parser)]
#[command(
    name = "qloc",
    version,
    about = "Simulate entanglement-based location verification: honest sessions, \
             cloning and relay adversaries, and mask statistics."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run honest verification sessions; exits 0 only if every trial verifies.
    Verify(RunArgs),
    /// Simulate the configured cloning or relay adversary.
    Attack(RunArgs),
    /// Measure mask-ensemble fidelity and uniformity statistics.
    MaskStats(RunArgs),
    /// Re-run the configured experiment across a list of parameter values.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Experiment configuration file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Override the configured master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Write output here instead of the configured target (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the configured output format.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for OutputFormat {
    fn from(arg: FormatArg) -> Self {
        match arg {
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Csv => OutputFormat::Csv,
        }
    }
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Parameter to vary: num_systems, fidelity, timing_tol,
    /// quantum_channel_speed, or processing_delay.
    #[arg(long)]
    param: String,
    /// Comma-separated values for the swept parameter.
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<f64>,
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let code = match dispatch(cli) {
        Ok(code) => code,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    };
    std::process::exit(code);
}

/// Load, override, and validate the configuration; reject experiment kinds
/// the invoked subcommand does not run.
fn prepare(
    args: &RunArgs,
    accepted: &[ExperimentKind],
) -> Result<(ExperimentConfig, OutputFormat, Option<PathBuf>), Failure> {
    let mut config = load_config(&args.config).map_err(Failure::Config)?;
    if let Some(seed) = args.seed {
        config.protocol.seed = seed;
    }
    config.validate().map_err(Failure::Config)?;
    if !accepted.contains(&config.experiment) {
        return Err(Failure::Config(format!(
            "config declares experiment \"{}\", which this subcommand does not run",
            config.experiment.label()
        )));
    }
    let format = args.format.map(OutputFormat::from).unwrap_or(config.format);
    let out = args.out.clone().or_else(|| config.out.clone());
    Ok((config, format, out))
}

fn dispatch(cli: Cli) -> Result<i32, Failure> {
    match cli.command {
        Command::Verify(args) => {
            let (config, format, out) = prepare(&args, &[ExperimentKind::Verify])?;
            let outcome = run_experiment(&config)?;
            write_output(&outcome, format, out.as_deref())?;
            Ok(outcome.exit)
        }
        Command::Attack(args) => {
            let (config, format, out) = prepare(
                &args,
                &[ExperimentKind::CloneAttack, ExperimentKind::RelayAttack],
            )?;
            let outcome = run_experiment(&config)?;
            write_output(&outcome, format, out.as_deref())?;
            Ok(outcome.exit)
        }
        Command::MaskStats(args) => {
            let (config, format, out) = prepare(&args, &[ExperimentKind::MaskStats])?;
            let outcome = run_experiment(&config)?;
            write_output(&outcome, format, out.as_deref())?;
            Ok(outcome.exit)
        }
        Command::Sweep(args) => {
            let (config, format, out) = prepare(&args.run, &[ExperimentKind::Sweep])?;
            let outcome = run_sweep(&config, &args.param, &args.values)?;
            write_output(&outcome, format, out.as_deref())?;
            Ok(outcome.exit)
        }
    }
}
