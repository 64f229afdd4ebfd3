use thiserror::Error;

/// Errors produced by cone algebra, problem evaluation, and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("cone kind mismatch: {0}")]
    ConeMismatch(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("feasible set is empty after projection")]
    EmptyFeasibleSet,

    #[error("all subproblem evaluations were non-finite; model is unbounded or infeasible")]
    InfeasibleModel,

    #[error("estimation error: {0}")]
    Estimation(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
