//! Command-line driver for the `specgap` library: sweeps the distance
//! function, certifies two-sided eigenvalue enclosures, computes the pencil
//! bounds and tabulates spectral pollution, emitting plot-ready CSV and
//! JSON reports.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{resolve, CommandKind, Format};

/// Failures sorted by exit code: `2` for configuration problems, `3` for
/// numerical failures, `4` for refuted method hypotheses.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Hypothesis(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Hypothesis(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Numerical(msg) => write!(f, "numerical failure: {msg}"),
            CliError::Hypothesis(msg) => write!(f, "hypothesis refuted: {msg}"),
        }
    }
}

impl From<specgap::Error> for CliError {
    fn from(err: specgap::Error) -> Self {
        let message = err.to_string();
        match err {
            specgap::Error::DimensionCap { .. }
            | specgap::Error::BadInput(_)
            | specgap::Error::MuOutsideBrackets { .. }
            | specgap::Error::RitzIndexOutOfRange { .. } => CliError::Config(message),
            specgap::Error::HypothesisHViolated { .. }
            | specgap::Error::ConditionAViolated { .. } => CliError::Hypothesis(message),
            specgap::Error::NotPositiveDefinite { .. }
            | specgap::Error::SingularShift { .. }
            | specgap::Error::IterationCapExceeded { .. }
            | specgap::Error::BracketInvalid { .. }
            | specgap::Error::NoMinimumFound
            | specgap::Error::NoRootInGap { .. } => CliError::Numerical(message),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "specgap",
    version,
    about = "Certified eigenvalue enclosures in gaps of the essential spectrum"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep the distance function over an interval and write its graph.
    Scan(CommonArgs),
    /// Certify two-sided eigenvalue enclosures over a truncation ladder.
    Enclose(CommonArgs),
    /// Compute the pencil-route bounds at the spectral shifts ν, μ.
    Bounds(CommonArgs),
    /// Run both bound routes and report their mutual deviations.
    Compare(CommonArgs),
    /// Tabulate in-gap Ritz values with collapse quotients; optionally run
    /// the synthetic-collapse demo.
    Pollute(PolluteArgs),
}

/// Flags shared by every subcommand. Omitted values fall back to the
/// config file (if any), then to built-in defaults.
#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Model description: inline JSON or a path to a JSON file.
    #[arg(long)]
    pub model: Option<String>,

    /// Truncation size(s); comma-separated ladder for enclose/pollute.
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,

    /// Output path (standard output when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Output format; scan and pollute default to csv, the rest to json.
    #[arg(long, value_enum)]
    pub format: Option<Format>,

    /// Enclosure refinement tolerance.
    #[arg(long, allow_negative_numbers = true)]
    pub tol: Option<f64>,

    /// Number of scan grid points (endpoints included).
    #[arg(long)]
    pub grid: Option<usize>,

    /// Evaluation interval; defaults to the model's spectral gap.
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
    pub interval: Option<Vec<f64>>,

    /// Left spectral shift for the pencil bounds (defaults to the interval start).
    #[arg(long, allow_negative_numbers = true)]
    pub nu: Option<f64>,

    /// Right spectral shift for the pencil bounds (defaults to the interval end).
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,

    /// Positive ε adds the strictified transform column to scans.
    #[arg(long = "epsilon-s", allow_negative_numbers = true)]
    pub epsilon_s: Option<f64>,

    /// Drop candidate minima whose F-value exceeds this threshold.
    #[arg(long = "spurious-threshold", allow_negative_numbers = true)]
    pub spurious_threshold: Option<f64>,

    /// Fixed-point decimals for CSV values (17 significant digits when omitted).
    #[arg(long)]
    pub digits: Option<usize>,

    /// JSON config file; command-line flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct PolluteArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Demo: lower level of the first bracket; level k sits at `low − k`.
    #[arg(long = "demo-low", allow_negative_numbers = true)]
    pub demo_low: Option<f64>,

    /// Demo: upper level of the first bracket; level k sits at `high + k`.
    #[arg(long = "demo-high", allow_negative_numbers = true)]
    pub demo_high: Option<f64>,

    /// Demo: target value inside every bracket.
    #[arg(long = "demo-mu", allow_negative_numbers = true)]
    pub demo_mu: Option<f64>,

    /// Demo: number of synthesized levels (default 6).
    #[arg(long = "demo-levels")]
    pub demo_levels: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("specgap: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Scan(args) => commands::scan(&resolve(CommandKind::Scan, &args, None)?),
        Command::Enclose(args) => commands::enclose(&resolve(CommandKind::Enclose, &args, None)?),
        Command::Bounds(args) => commands::bounds(&resolve(CommandKind::Bounds, &args, None)?),
        Command::Compare(args) => commands::compare(&resolve(CommandKind::Compare, &args, None)?),
        Command::Pollute(args) => {
            commands::pollute(&resolve(CommandKind::Pollute, &args.common, Some(&args))?)
        }
    }
}
