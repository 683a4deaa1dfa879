//! `isac`: evaluate, sweep and simulate rate-distortion tradeoffs from
//! JSON channel and scheme files.
//!
//! Exit status is 0 on success, 2 for invalid input and 3 when a
//! fixed-point solver fails to converge. Set `ISAC_LOG` to `quiet`,
//! `info` or `debug` to control diagnostics on stderr.

mod commands;
mod grid;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "isac", version, about = "Rate-distortion regions for joint communication and sensing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Multiple-access channel with generalized feedback.
    #[command(subcommand)]
    Mac(MacCommand),
    /// Two-way (device-to-device) channel.
    #[command(subcommand)]
    D2d(D2dCommand),
    /// Monte Carlo checks.
    #[command(subcommand)]
    Sim(SimCommand),
    /// Print a built-in channel or scheme document.
    Preset(PresetArgs),
}

#[derive(Subcommand, Debug)]
enum MacCommand {
    /// Best rate pair of one scheme, or membership of --r1/--r2.
    Eval(EvalArgs),
    /// Tradeoff curve of a parametrized family over a D2 grid.
    Sweep(SweepArgs),
}

#[derive(Subcommand, Debug)]
enum D2dCommand {
    /// Rates and distortions of one scheme.
    Eval(EvalArgs),
    /// Tradeoff curve of a parametrized family over a D2 grid.
    Sweep(SweepArgs),
    /// Achievable rates and converse of the binary XOR two-way channel.
    ClosedForm(ClosedFormArgs),
    /// Stationary block law of an adaptive scheme.
    Stationary(StationaryArgs),
}

#[derive(Subcommand, Debug)]
enum SimCommand {
    /// Exact versus simulated distortion of the optimal estimators.
    Distortion(SimArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Channel document (JSON).
    #[arg(long)]
    pub channel: PathBuf,
    /// Region to evaluate: kobayashi, collab, nonadaptive, separation or jscc.
    #[arg(long)]
    pub theorem: String,
    /// Fixed-point tolerance in total variation.
    #[arg(long, default_value_t = isac_core::d2d::DEFAULT_TOL)]
    pub tol: f64,
    /// Coupling of the next block's states in hybrid coding: fresh or reuse.
    #[arg(long, default_value = "fresh")]
    pub primed_state: String,
    /// Rate objective: sum_rate, r1 or r2.
    #[arg(long, default_value = "sum_rate")]
    pub objective: String,
    /// Write the result here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[command(flatten)]
    pub common: Common,
    /// Scheme document (JSON).
    #[arg(long)]
    pub scheme: PathBuf,
    #[arg(long, requires = "r2")]
    pub r1: Option<f64>,
    #[arg(long, requires = "r1")]
    pub r2: Option<f64>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    /// Built-in family: example2 (MAC) or example3 (two-way). Defaults by channel model.
    #[arg(long)]
    pub family: Option<String>,
    /// D2 bounds as `start:stop:step` or a comma-separated list.
    #[arg(long, default_value = "0:0.1:0.005")]
    pub grid: String,
    /// Optional bound on D1 at every grid point.
    #[arg(long)]
    pub d1: Option<f64>,
    /// Scheme evaluations across the whole sweep.
    #[arg(long, default_value_t = 2000)]
    pub budget: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct ClosedFormArgs {
    #[arg(long)]
    pub p1: f64,
    #[arg(long)]
    pub p2: f64,
    #[arg(long)]
    pub d1: f64,
    #[arg(long)]
    pub d2: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct StationaryArgs {
    #[arg(long)]
    pub channel: PathBuf,
    #[arg(long)]
    pub scheme: PathBuf,
    #[arg(long, default_value_t = isac_core::d2d::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub scheme: PathBuf,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct PresetArgs {
    /// example1-channel, example1-scheme, example2-channel, example2-scheme,
    /// example3-channel, example3-scheme or example3-han.
    pub name: String,
    /// Comma-separated preset parameters; see the README for each preset.
    #[arg(long)]
    pub values: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn init_logging() {
    let level = match std::env::var("ISAC_LOG").as_deref() {
        Ok("quiet") => log::LevelFilter::Off,
        Ok("info") => log::LevelFilter::Info,
        Ok("debug") => log::LevelFilter::Debug,
        _ => log::LevelFilter::Warn,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
}

/// 3 for solver non-convergence, 2 for everything else.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<isac_core::Error>() {
        Some(e) if e.is_numerical() => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    init_logging();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Mac(MacCommand::Eval(a)) => commands::mac_eval(&a),
        Command::Mac(MacCommand::Sweep(a)) => commands::sweep(&a, true),
        Command::D2d(D2dCommand::Eval(a)) => commands::d2d_eval(&a),
        Command::D2d(D2dCommand::Sweep(a)) => commands::sweep(&a, false),
        Command::D2d(D2dCommand::ClosedForm(a)) => commands::closed_form(&a),
        Command::D2d(D2dCommand::Stationary(a)) => commands::stationary(&a),
        Command::Sim(SimCommand::Distortion(a)) => commands::sim_distortion(&a),
        Command::Preset(a) => commands::preset(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
