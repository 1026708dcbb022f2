use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("model has no cells")]
    NoCells,
    #[error("model has {cells} cells; at most {max} are supported")]
    TooManyCells { cells: usize, max: usize },
    #[error("effect {effect} is empty")]
    EmptySubset { effect: usize },
    #[error("effect {effect} references cell {index}, but the model has {cells} cells")]
    IndexOutOfRange { effect: usize, index: usize, cells: usize },
    #[error("effect {effect} lists cell {index} more than once")]
    DuplicateIndex { effect: usize, index: usize },
    #[error("effects {first} and {second} cover the same cells")]
    DuplicateSubset { first: usize, second: usize },
    #[error("cell {cell} ({label}) belongs to no effect")]
    EmptyColumn { cell: usize, label: String },
    #[error("design matrix has rank {rank} but {rows} rows")]
    RankDeficient { rank: usize, rows: usize },
    #[error("kernel basis entry does not fit in a 64-bit integer")]
    KernelOverflow,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("observed table has zero total")]
    ZeroTotal,
    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("fitted value at cell {cell} is not positive ({value})")]
    NonPositiveFitted { cell: usize, value: f64 },
    #[error("parameter at cell {cell} is not positive ({value})")]
    NonPositiveParameter { cell: usize, value: f64 },
    #[error("probabilities sum to {sum}, not 1")]
    NotNormalized { sum: f64 },
    #[error("parameter is not in the model: max |D log v| = {residual:e}")]
    NotInModel { residual: f64 },
    #[error("model has no overall effect")]
    NoOverallEffect,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sample is empty")]
    EmptySample,
    #[error("{failed} of {replicates} replicates failed to fit; aborting")]
    TooManyFailures { failed: usize, replicates: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
