//! Command-line front end for `skrates-core`.

mod commands;
pub mod config;

use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::{run, sweep_csv};

/// Exit codes of the `skrates` binary.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const IO: i32 = 3;
    pub const ACCEPTANCE: i32 = 4;
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flag values or a failing model precondition.
    Usage(String),
    /// Malformed or inconsistent configuration file.
    Config(String),
    Io(String),
    /// The run finished but a configured predicate failed.
    Acceptance(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => exit::USAGE,
            CliError::Io(_) => exit::IO,
            CliError::Acceptance(_) => exit::ACCEPTANCE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
            CliError::Acceptance(m) => write!(f, "acceptance failed: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

#[derive(Debug, Parser)]
#[command(name = "skrates", version, about = "Secret-key rate bounds and protocol simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// BEC/BSC model: bound sweeps and point queries.
    Becbsc {
        #[command(subcommand)]
        command: BecBscCommand,
    },
    /// Source regime of a BEC(beta) / BSC(eps) pair.
    Classify {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        beta: f64,
    },
    /// Bounds for the state-dependent channels.
    State {
        #[command(subcommand)]
        command: StateCommand,
    },
    /// Monte Carlo run of a key agreement scheme.
    Simulate(SimulateArgs),
}

#[derive(Debug, Subcommand)]
pub enum BecBscCommand {
    /// All four bounds over an evenly spaced beta grid.
    Sweep(SweepArgs),
    /// Bounds at a single beta.
    Point {
        #[arg(long)]
        zeta: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, value_enum, default_value_t = BoundChoice::All)]
        bound: BoundChoice,
    },
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub zeta: f64,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.0)]
    pub beta_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta_max: f64,
    #[arg(long, default_value_t = 201)]
    pub steps: usize,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundChoice {
    Outer,
    Sep,
    Sep1l,
    Joint,
    All,
}

#[derive(Debug, Subcommand)]
pub enum StateCommand {
    /// Binary state channel with erased side information.
    Binary {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        zeta: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        eps: f64,
    },
    /// Gaussian channel with a Gaussian state known to Alice.
    Gaussian {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        n1: f64,
        #[arg(long)]
        n2: f64,
        /// Maximize over both parameters instead of the closed form.
        #[arg(long)]
        full: bool,
    },
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(value_enum)]
    pub scheme: Scheme,
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the configured trial count.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Overrides the configured seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scheme {
    Joint,
    Separate,
}
