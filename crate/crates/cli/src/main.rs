//! `ultrafrac` — evaluate the closed-form integrals and Riesz constants,
//! apply `D^alpha` / `I^alpha` to radial-function documents, solve the
//! Cauchy problem, and run the verification suite.
//!
//! Exit codes: 0 success, 1 validation/usage error, 2 solver error
//! (singular pivot or no convergence), 3 verification failure.

mod commands;
mod config;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::RunConfig;

#[derive(Debug, Parser)]
#[command(
    name = "ultrafrac",
    version,
    about = "Fractional calculus of radial functions over a local field",
    after_help = "Any parameter may also come from a JSON config file via --config; \
                  explicit flags win on conflict."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print Gamma_K, d_alpha and c_alpha for the given q and alpha
    Constants(CommonArgs),
    /// Tabulate the ball/sphere/sector integrals over a level range
    Integrate(CommonArgs),
    /// Apply the fractional derivative D^alpha to a radial-function document
    ApplyD(CommonArgs),
    /// Apply the right inverse I^alpha to a radial-function document
    ApplyI(CommonArgs),
    /// Solve D^alpha u + a u = f, u(0) = u0 (inputs: a then f)
    Solve(CommonArgs),
    /// Per-level residual D^alpha u + a u - f (inputs: a, f, u)
    Residual(CommonArgs),
    /// Run the verification suite and report each criterion
    Verify(CommonArgs),
}

/// Output format for tables and documents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Solver method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Direct,
    Picard,
}

#[derive(Debug, Clone, Args, Default)]
pub struct CommonArgs {
    /// Residue-field cardinality q >= 2
    #[arg(long)]
    q: Option<u32>,
    /// Fractional order alpha > 0
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Lowest level of the working range
    #[arg(long, allow_negative_numbers = true)]
    n_min: Option<i32>,
    /// Highest level of the working range
    #[arg(long, allow_negative_numbers = true)]
    n_max: Option<i32>,
    /// Input document path; repeatable (solve: a then f; residual: a, f, u)
    #[arg(long = "input")]
    inputs: Vec<std::path::PathBuf>,
    /// Real part of the initial value u(0)
    #[arg(long, allow_negative_numbers = true)]
    u0_re: Option<f64>,
    /// Imaginary part of the initial value u(0)
    #[arg(long, allow_negative_numbers = true)]
    u0_im: Option<f64>,
    /// Dimension of the matrix/vector-valued problem (matrix mode when > 0)
    #[arg(long)]
    dim: Option<usize>,
    /// Output path (stdout when omitted)
    #[arg(long)]
    output: Option<std::path::PathBuf>,
    /// Output format for tables and documents
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Tolerance override (Picard stopping criterion)
    #[arg(long, allow_negative_numbers = true)]
    tol: Option<f64>,
    /// Solver method for `solve`
    #[arg(long, value_enum)]
    method: Option<Method>,
    /// Iteration budget for the Picard solver
    #[arg(long)]
    max_iter: Option<usize>,
    /// JSON config file supplying any of the parameters above
    #[arg(long)]
    config: Option<std::path::PathBuf>,
}

/// Error carrying the process exit code.
#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub code: u8,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            code: 1,
        }
    }

    fn verification(failed: usize) -> Self {
        Self {
            message: format!("{failed} verification criterion(s) failed"),
            code: 3,
        }
    }
}

impl From<ultrafrac::Error> for CliError {
    fn from(err: ultrafrac::Error) -> Self {
        let code = match err {
            ultrafrac::Error::SingularPivot { .. } | ultrafrac::Error::NoConvergence { .. } => 2,
            _ => 1,
        };
        Self {
            message: err.to_string(),
            code,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        Self {
            message: err.to_string(),
            code: 1,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // help/version go to stdout with success, everything else is a
            // usage error (exit 1, not clap's default 2 — that code is the
            // solver's)
            use clap::error::ErrorKind;
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{err}");
                return ExitCode::SUCCESS;
            }
            eprint!("{err}");
            return ExitCode::from(1);
        }
    };

    let result = match cli.command {
        Command::Constants(args) => RunConfig::resolve(args).and_then(commands::constants),
        Command::Integrate(args) => RunConfig::resolve(args).and_then(commands::integrate),
        Command::ApplyD(args) => RunConfig::resolve(args).and_then(commands::apply_d),
        Command::ApplyI(args) => RunConfig::resolve(args).and_then(commands::apply_i),
        Command::Solve(args) => RunConfig::resolve(args).and_then(commands::solve),
        Command::Residual(args) => RunConfig::resolve(args).and_then(commands::residual),
        Command::Verify(args) => RunConfig::resolve(args).and_then(commands::verify),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}
