use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use dunkl_fpe_core::{DunklParams, GridSpec, Sector};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Numerical eigenvalues per sector against the closed-form 4n.
    Spectrum,
    /// Eigenfunction table on the grid, x first, curves in ascending n.
    Eigfun,
    /// Crank-Nicolson evolution trace with modal projections and a decay fit.
    Evolve,
    /// Runs the invariant suite and reports each check.
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Eigfun => "eigfun",
            Command::Evolve => "evolve",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ParityChoice {
    Even,
    Odd,
    Both,
}

impl ParityChoice {
    pub fn sectors(self) -> &'static [Sector] {
        match self {
            ParityChoice::Even => &[Sector::Even],
            ParityChoice::Odd => &[Sector::Odd],
            ParityChoice::Both => &[Sector::Even, Sector::Odd],
        }
    }

    fn name(self) -> &'static str {
        match self {
            ParityChoice::Even => "even",
            ParityChoice::Odd => "odd",
            ParityChoice::Both => "both",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

/// Dunkl-Fokker-Planck experiments for the drift `w = a/x - x`.
#[derive(Debug, Clone, Parser)]
#[command(name = "dunkl-fpe", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub config: RunConfig,
}

#[derive(Debug, Clone, PartialEq, clap::Args)]
pub struct RunConfig {
    /// Pole strength of the drift.
    #[arg(long, global = true, default_value_t = 1.0, allow_negative_numbers = true)]
    pub a: f64,
    /// Dunkl parameter, must exceed -1/2.
    #[arg(long, global = true, default_value_t = 0.5, allow_negative_numbers = true)]
    pub mu: f64,
    #[arg(long, global = true, value_enum, default_value_t = ParityChoice::Both)]
    pub parity: ParityChoice,
    #[arg(long, global = true, default_value_t = 5)]
    pub n_max: usize,
    /// Grid points on [-L, L]; must be odd.
    #[arg(long, global = true, default_value_t = 2001)]
    pub grid_n: usize,
    #[arg(long = "domain-l", global = true, default_value_t = 8.0, allow_negative_numbers = true)]
    pub domain_l: f64,
    #[arg(long, global = true, default_value_t = 1.0, allow_negative_numbers = true)]
    pub t_final: f64,
    #[arg(long, global = true, default_value_t = 1e-4, allow_negative_numbers = true)]
    pub dt: f64,
    /// mode:N:PARITY | gaussian:CENTER,WIDTH | file:PATH
    #[arg(long, global = true, default_value = "mode:1:even")]
    pub initial: String,
    /// Steps between trace rows.
    #[arg(long, global = true, default_value_t = 100)]
    pub sample_every: usize,
    /// Scale curves to unit mu-weighted norm instead of C = 1.
    #[arg(long, global = true)]
    pub normalize: bool,
    /// Add numerical eigenvectors next to the closed forms.
    #[arg(long, global = true)]
    pub numeric: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Fail with exit code 2 when an eigenvalue error exceeds this.
    #[arg(long, global = true)]
    pub assert_tol: Option<f64>,
    /// Reduced grids and convergence-scaled tolerances for verify.
    #[arg(long, global = true)]
    pub quick: bool,
    /// Flips the sign of one operator in verify to prove the suite can fail.
    #[arg(long, global = true)]
    pub selftest_negate: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            a: 1.0,
            mu: 0.5,
            parity: ParityChoice::Both,
            n_max: 5,
            grid_n: 2001,
            domain_l: 8.0,
            t_final: 1.0,
            dt: 1e-4,
            initial: "mode:1:even".into(),
            sample_every: 100,
            normalize: false,
            numeric: false,
            format: Format::Csv,
            output: None,
            assert_tol: None,
            quick: false,
            selftest_negate: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self, command: Command) -> Result<(), CliError> {
        if !(self.mu.is_finite() && self.mu > -0.5) {
            return Err(CliError::Config(format!("--mu {} is invalid: mu > -1/2 is required", self.mu)));
        }
        if !self.a.is_finite() {
            return Err(CliError::Config(format!("--a {} is not finite", self.a)));
        }
        if self.grid_n % 2 == 0 {
            return Err(CliError::Config(format!("--grid-n {} must be odd so that x = 0 is a node", self.grid_n)));
        }
        if !(self.domain_l.is_finite() && self.domain_l > 0.0) {
            return Err(CliError::Config(format!("--domain-l {} must be positive", self.domain_l)));
        }
        if command == Command::Evolve {
            if !(self.dt.is_finite() && self.dt > 0.0) {
                return Err(CliError::Config(format!("--dt {} must be positive", self.dt)));
            }
            if !(self.t_final.is_finite() && self.t_final >= 0.0) {
                return Err(CliError::Config(format!("--t-final {} must be non-negative", self.t_final)));
            }
            if self.sample_every == 0 {
                return Err(CliError::Config("--sample-every must be at least 1".into()));
            }
        }
        if let Some(tol) = self.assert_tol {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(CliError::Config(format!("--assert-tol {tol} must be positive")));
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<GridSpec, CliError> {
        Ok(GridSpec::new(self.domain_l, self.grid_n)?)
    }

    pub fn params(&self) -> Result<DunklParams, CliError> {
        Ok(DunklParams::new(self.mu)?)
    }

    /// Every flag as `(name, value)`, in declaration order, so a run can be
    /// reproduced from its own header.
    pub fn echo(&self, command: Command) -> Vec<(&'static str, String)> {
        let mut out = vec![
            ("command", command.name().to_string()),
            ("version", env!("CARGO_PKG_VERSION").to_string()),
            ("a", self.a.to_string()),
            ("mu", self.mu.to_string()),
            ("parity", self.parity.name().to_string()),
            ("n-max", self.n_max.to_string()),
            ("grid-n", self.grid_n.to_string()),
            ("domain-l", self.domain_l.to_string()),
            ("t-final", self.t_final.to_string()),
            ("dt", self.dt.to_string()),
            ("initial", self.initial.clone()),
            ("sample-every", self.sample_every.to_string()),
            ("normalize", self.normalize.to_string()),
            ("numeric", self.numeric.to_string()),
            ("format", self.format.name().to_string()),
            ("quick", self.quick.to_string()),
            ("selftest-negate", self.selftest_negate.to_string()),
        ];
        out.push((
            "assert-tol",
            self.assert_tol.map_or_else(|| "none".to_string(), |t| t.to_string()),
        ));
        out
    }
}
