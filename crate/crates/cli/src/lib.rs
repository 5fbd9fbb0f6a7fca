//! Command-line front end: argument parsing, the commands, and the
//! validation suite.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 math-domain failure,
//! 3 validation failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::ffi::OsString;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub mod commands;
pub mod output;
pub mod validate;

/// Version of the JSON layout documented in `docs/schema.md`.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Math(#[from] floquet_tls::Error),

    #[error("{0}")]
    Domain(String),

    #[error("{failed} of {total} validation checks failed")]
    Validation { failed: usize, total: usize },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => 1,
            CliError::Math(e) if !e.is_domain() => 1,
            CliError::Math(_) | CliError::Domain(_) => 2,
            CliError::Validation { .. } => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "floquet-tls", version, about = "Quasienergies of periodically driven two-level systems")]
pub struct Cli {
    /// Worker threads for parameter sweeps (default: all cores).
    #[arg(long, global = true, env = "FLOQUET_TLS_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Periodic Bloch trajectory over one drive period.
    Solve(SolveArgs),
    /// Continued quasienergy branch over an omega sweep.
    Quasienergy(QuasienergyArgs),
    /// Resonance frequencies of the linear drive.
    Resonance(ResonanceArgs),
    /// Exact Bloch-Siegert coefficients.
    BlochSiegert(BlochSiegertArgs),
    /// Cross-check suite with a pass/fail report.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Ode,
    Fourier,
}

/// `START:STOP:COUNT` (inclusive, `COUNT >= 2`) or a single value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|k| if k + 1 == self.count { self.stop } else { self.start + step * k as f64 })
            .collect()
    }
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("invalid number {v:?}: {e}"));
        let parts: Vec<&str> = s.split(':').collect();
        let range = match parts.as_slice() {
            [v] => Range { start: num(v)?, stop: num(v)?, count: 1 },
            [a, b, c] => {
                let count = c.trim().parse::<usize>().map_err(|e| format!("invalid count {c:?}: {e}"))?;
                if count < 2 {
                    return Err(format!("sweep count must be at least 2, got {count}"));
                }
                Range { start: num(a)?, stop: num(b)?, count }
            }
            _ => return Err(format!("expected START:STOP:COUNT or a single value, got {s:?}")),
        };
        if !(range.start.is_finite() && range.stop.is_finite()) {
            return Err(format!("range endpoints must be finite, got {s:?}"));
        }
        Ok(range)
    }
}

/// Where and how a command writes its artifact.
#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output format (default depends on the command).
    #[arg(long, value_enum)]
    pub format: Option<Format>,

    /// Output file (default: standard output).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SolveArgs {
    #[arg(long, default_value_t = 1.0)]
    pub omega0: f64,
    /// Amplitude of the x component of the drive.
    #[arg(long)]
    pub f: f64,
    /// Amplitude of the y component of the drive.
    #[arg(long, default_value_t = 0.0)]
    pub g: f64,
    #[arg(long)]
    pub omega: f64,
    #[arg(long, value_enum, default_value = "ode")]
    pub method: MethodArg,
    /// Fourier truncation; also the number of harmonics in the JSON table.
    #[arg(long, default_value_t = 20)]
    pub n_trunc: usize,
    /// Integrator tolerance.
    #[arg(long, default_value_t = floquet_tls::dynamics::DEFAULT_TOL)]
    pub tol: f64,
    /// Points per period.
    #[arg(long, default_value_t = 1024)]
    pub samples: usize,
    /// Also compute the orbit with the other method and report the deviation.
    #[arg(long)]
    pub compare: bool,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct QuasienergyArgs {
    #[arg(long, default_value_t = 1.0)]
    pub omega0: f64,
    #[arg(long)]
    pub f: f64,
    #[arg(long, default_value_t = 0.0)]
    pub g: f64,
    /// Drive frequencies as START:STOP:COUNT.
    #[arg(long)]
    pub omega: Range,
    #[arg(long, value_enum, default_value = "ode")]
    pub method: MethodArg,
    /// Initial Fourier truncation (grown automatically until converged).
    #[arg(long, default_value_t = 20)]
    pub n_trunc: usize,
    #[arg(long, default_value_t = floquet_tls::dynamics::DEFAULT_TOL)]
    pub tol: f64,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ResonanceArgs {
    /// Resonance indices, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    /// Drive amplitudes as START:STOP:COUNT or a single value.
    #[arg(long)]
    pub f: Range,
    #[arg(long, default_value_t = 1.0)]
    pub omega0: f64,
    #[arg(long, default_value_t = floquet_tls::resonance::DEFAULT_TRUNCATION)]
    pub n_trunc: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BlochSiegertArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub max_m: usize,
    /// Truncation of the exact tridiagonal system (default: sufficient for `max_m`).
    #[arg(long)]
    pub n_trunc: Option<usize>,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Oracles,
    Gradients,
    Homogeneity,
    Split,
    Routes,
    Series,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Flips the sign of the sub-diagonal couplings of the Fourier system.
    CouplingSign,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ValidateArgs {
    /// Restrict to these groups, comma separated.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub only: Vec<Group>,
    /// Seed for the randomized parameter points.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random parameter points per randomized group.
    #[arg(long, default_value_t = 8)]
    pub points: usize,
    #[arg(long, value_enum, hide = true)]
    pub inject_fault: Option<Fault>,
    /// Report file (default: standard output).
    #[arg(long, short)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

/// Runs a parsed command line.
pub fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        floquet_tls::par::set_threads(n).map_err(CliError::Usage)?;
    }
    match cli.command {
        Command::Solve(a) => commands::solve(&a),
        Command::Quasienergy(a) => commands::quasienergy(&a),
        Command::Resonance(a) => commands::resonance(&a),
        Command::BlochSiegert(a) => commands::bloch_siegert(&a),
        Command::Validate(a) => validate::run(&a),
    }
}

/// Parses `args`, runs the command, reports errors on stderr and returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
