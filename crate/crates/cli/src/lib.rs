//! Command-line driver for `hadperm`: batch bound checks, heat-flow traces,
//! `C(p)` sweeps and log-convexity checks, written as CSV or JSON.
//!
//! Exit codes: `0` success, `1` a checked inequality was violated, `2` bad
//! input or an IO failure. Every run prints a one-line JSON summary on
//! stdout; the full table goes to `--out` when given.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

pub mod commands;
pub mod io;

pub use io::{Format, MatrixFile, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Core(#[from] hadperm::Error),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

#[derive(Debug, Parser)]
#[command(
    name = "hadperm",
    version,
    about = "Permanent bounds, heat flow on S_N and sharp-constant experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the permanent bounds on random (or given) instances.
    Verify(VerifyArgs),
    /// Trace eta_p(t) along the heat flow of the columns.
    Flow(FlowArgs),
    /// Estimate C(p) over a grid of exponents.
    Cp(CpArgs),
    /// Check log-convexity of a multilinear form's norm constant.
    Interp(InterpArgs),
}

/// Flags shared by every command.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Vector length N [default: verify 4, flow 4, cp 3, interp 3]
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of vectors K; verify switches to the sub-permanent bounds
    #[arg(long)]
    pub k: Option<usize>,
    /// Single exponent p [default: flow 2; verify uses 1, 1.5, 2]
    #[arg(long)]
    pub p: Option<f64>,
    /// Exponent grid `start:end:count` [default: cp 1:2:11]
    #[arg(long = "p-grid")]
    pub p_grid: Option<String>,
    /// Random instances (verify) or random optimizer starts (cp, interp)
    /// [default: verify 100, cp 8, interp 12]
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Report file; without it only the summary line is printed
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads, 0 = all cores
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Violation tolerance [default: verify 1e-9 relative, flow 1e-9, cp 1e-6]
    #[arg(long)]
    pub tol: Option<f64>,
    /// Input matrix in the JSON matrix format
    #[arg(long)]
    pub matrix: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// Test hook: multiply every right-hand side by this factor.
    #[arg(long, hide = true, default_value_t = 1.0)]
    pub corrupt_bound: f64,
}

#[derive(Debug, Clone, Args)]
pub struct FlowArgs {
    #[command(flatten)]
    pub common: Common,
    /// Start from the 3x3 circulant with parameters x, y
    #[arg(long, num_args = 2, value_names = ["X", "Y"], allow_negative_numbers = true)]
    pub circulant: Option<Vec<f64>>,
    /// Last time of the grid [default: 5/N]
    #[arg(long, allow_negative_numbers = true)]
    pub t_max: Option<f64>,
    /// Grid points including t = 0
    #[arg(long, default_value_t = 31)]
    pub t_points: usize,
    /// Use the heat semigroup on all of S_N (N <= 6) instead of the closed form
    #[arg(long)]
    pub brute_force: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CpArgs {
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct InterpArgs {
    #[command(flatten)]
    pub common: Common,
    /// Use the permanent tensor of order N (arity M = N)
    #[arg(long)]
    pub perm_tensor: bool,
    /// Arity of the random nonnegative form
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    /// Interior points t = i/(T+1), i = 1..T
    #[arg(long, default_value_t = 5)]
    pub t_points: usize,
    /// Segment endpoint q as comma-separated reciprocals [default: 1,..,1
    /// for the permanent tensor, random otherwise]
    #[arg(long)]
    pub q: Option<String>,
    /// Segment endpoint r [default: 0.5,..,0.5 for the permanent tensor,
    /// random otherwise]
    #[arg(long)]
    pub r: Option<String>,
}

/// Result of a command: the summary line and the number of violations.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub summary: Value,
    pub violations: usize,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.violations == 0 {
            0
        } else {
            1
        }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let threads = match &cli.command {
        Command::Verify(a) => a.common.threads,
        Command::Flow(a) => a.common.threads,
        Command::Cp(a) => a.common.threads,
        Command::Interp(a) => a.common.threads,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()?;
    pool.install(|| match &cli.command {
        Command::Verify(a) => commands::verify(a),
        Command::Flow(a) => commands::flow(a),
        Command::Cp(a) => commands::cp(a),
        Command::Interp(a) => commands::interp(a),
    })
}

/// `start:end:count`, evenly spaced and inclusive.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Grid(format!("expected start:end:count, got `{spec}`"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if !a.is_finite() || !b.is_finite() || b < a || count == 0 || (count == 1 && a != b) {
        return Err(bad());
    }
    if count == 1 {
        return Ok(vec![a]);
    }
    let last = (count - 1) as f64;
    Ok((0..count).map(|i| a + (b - a) * i as f64 / last).collect())
}

/// Comma-separated reals.
pub fn parse_list(spec: &str) -> Result<Vec<f64>, CliError> {
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Input(format!("not a number list: `{spec}`")))
        })
        .collect()
}
