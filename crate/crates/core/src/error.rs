use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("argument {value} outside the domain of {function}")]
    Domain { function: &'static str, value: f64 },
    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },
    #[error("non-finite coefficient at x = {x}")]
    Singularity { x: f64 },
    #[error("parity requirement violated: {0}")]
    Parity(&'static str),
    #[error("{0} is not normalizable")]
    Divergence(&'static str),
    #[error("{sector} sector is irregular: Laguerre order {alpha} must exceed -1")]
    Regularity { sector: &'static str, alpha: f64 },
    #[error("grid functions live on different grids")]
    GridMismatch,
    #[error("grid with {n_points} points is invalid: {reason}")]
    InvalidGrid {
        n_points: usize,
        reason: &'static str,
    },
    #[error("singular pivot at row {row} in tridiagonal solve")]
    SingularPivot { row: usize },
    #[error("density grew by a factor {growth:e} by t = {time}")]
    BlowUp { time: f64, growth: f64 },
    #[error("decay fit is degenerate: {0}")]
    DegenerateFit(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
