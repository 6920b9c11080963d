//! `detta`: simulate scenarios, run the tracking and filtering pipeline,
//! sweep filter gains, compare free-flight strategies and evaluate runs.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use detta::Error;

#[derive(Debug, Parser)]
#[command(name = "detta", version, about = "Track-keyed attribute filtering lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a scenario from a preset or a spec file.
    Simulate(SimulateArgs),
    /// Track, filter and account a scenario.
    Run(RunArgs),
    /// Score a grid of (g, h) gains on one channel.
    Sweep(SweepArgs),
    /// Compare keep and predict across strides.
    Freeflight(FreeflightArgs),
    /// CLEAR MOT and attribute accuracy of a run.
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Random seed for scenario generation.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long, conflicts_with = "spec", required_unless_present = "spec")]
    preset: Option<String>,
    /// Scenario spec (TOML).
    #[arg(long, alias = "config")]
    spec: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

/// Where a command's scenario comes from.
#[derive(Debug, Args)]
struct Input {
    /// Scenario file.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    scenario: Option<PathBuf>,
    /// Generate the scenario from a preset with `--seed` instead.
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    input: Input,
    /// Run configuration (TOML); defaults apply to omitted fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long)]
    config: Option<PathBuf>,
    /// `head`, a joint such as `skel.l_wrist`, or a group
    /// (`wrists`, `elbows`, `shoulders`, `head_neck`, `skeleton`).
    #[arg(long, default_value = "head")]
    channel: String,
    /// Comma list or `start:stop:step`.
    #[arg(long, default_value = "0:1:0.1")]
    g_grid: String,
    #[arg(long, default_value = "0,0.02,0.1,0.2")]
    h_grid: String,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct FreeflightArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "head")]
    channel: String,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,5")]
    strides: Vec<u64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Scenario with `trk` and `trk-attr` records, as written by `run`.
    #[arg(long)]
    scenario: PathBuf,
    #[command(flatten)]
    common: Common,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidArgument(_) | Error::Config(_) | Error::Validation(_) => 1,
        Error::UndefinedMetric(_) => 3,
        Error::TimeRegression { .. }
        | Error::Parse { .. }
        | Error::UnsupportedVersion(_)
        | Error::Data(_)
        | Error::Ordering { .. }
        | Error::Io { .. } => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage_error = e.use_stderr();
            let _ = e.print();
            return if usage_error { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => commands::simulate(a),
        Command::Run(a) => commands::run(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Freeflight(a) => commands::freeflight(a),
        Command::Eval(a) => commands::eval(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
