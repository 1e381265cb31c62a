//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by instance construction, solvers, and the file format.
#[derive(Debug, Error)]
pub enum SquboError {
    /// A vector length does not match the instance dimension.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// Malformed input: bad indices, non-finite values, invalid configuration.
    #[error("{0}")]
    InvalidArgument(String),

    /// The instance is too large for an exhaustive or dense-operator routine.
    #[error("instance with {n} variables exceeds the cap of {cap}")]
    CapacityExceeded { n: usize, cap: usize },

    /// A solver produced a non-finite quantity and cannot continue.
    #[error("numerical failure at iteration {iteration}: {message}")]
    NumericalFailure { iteration: usize, message: String },

    /// Every restart of a multistart solver failed.
    #[error("all {restarts} restarts failed; first failure: {first}")]
    AllRestartsFailed { restarts: usize, first: String },

    /// The instance file could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// An underlying I/O operation failed.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
