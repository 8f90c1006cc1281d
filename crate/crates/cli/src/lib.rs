//! Front end for `dunkl-fpe-core`.
//!
//! Exit codes: 0 success, 1 invalid configuration, 2 tolerance breach or
//! failed verification, 3 numerical failure (stepper or eigensolver).

pub mod config;
pub mod eigfun;
pub mod evolve;
pub mod output;
pub mod spectrum;
pub mod tolerances;
pub mod verify;

use clap::Parser;
use dunkl_fpe_core::Error as CoreError;

pub use config::{Cli, Command, Format, ParityChoice, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Tolerance(String),
    #[error("{0}")]
    Numerical(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Tolerance(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => 3,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Convergence { .. }
            | CoreError::SingularPivot { .. }
            | CoreError::BlowUp { .. }
            | CoreError::DegenerateFit(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

/// Runs one command with a validated config, writing to `--output` or stdout.
pub fn execute(command: Command, cfg: &RunConfig) -> Result<(), CliError> {
    cfg.validate(command)?;
    match command {
        Command::Spectrum => spectrum::run(cfg),
        Command::Eigfun => eigfun::run(cfg),
        Command::Evolve => evolve::run(cfg),
        Command::Verify => verify::run(cfg),
    }
}

/// Parses `args` (program name first) and returns the process exit code.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command, &cli.config) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("dunkl-fpe {}: {e}", cli.command.name());
            e.exit_code()
        }
    }
}

pub(crate) fn warn(msg: &str) {
    eprintln!("warning: {msg}");
}
