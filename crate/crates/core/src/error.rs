use thiserror::Error;

/// Errors produced by game construction, solving and certification.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid strategy set: {0}")]
    InvalidStrategySet(String),

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("profile is not strictly feasible: constraint {constraint} has margin {margin:e}")]
    NonStrictlyFeasible { constraint: usize, margin: f64 },

    #[error("initial profile is not strictly feasible (beta = {beta:e})")]
    InfeasibleStart { beta: f64 },

    #[error("profile is infeasible: {0}")]
    InfeasibleProfile(String),

    #[error("feasibility margin must be positive, got {0:e}")]
    NonPositiveMargin(f64),

    #[error("potential identity violated by {deviation:e} (tolerance {tolerance:e})")]
    PotentialIdentityFailed { deviation: f64, tolerance: f64 },

    #[error("grid has {cells} cells, budget is {budget}")]
    CellBudgetExceeded { cells: usize, budget: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
