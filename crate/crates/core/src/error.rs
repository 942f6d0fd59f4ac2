//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by construction, parsing, and the numeric routines.
#[derive(Debug, Error)]
pub enum Error {
    /// Matrix or mask dimensions do not line up for the requested operation.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Input violates a documented precondition (empty matrix, non-finite
    /// entry, bad partition, out-of-range parameter, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An exact routine was asked for a problem size it cannot enumerate.
    #[error("problem too large for exact computation: {0}")]
    TooLarge(String),

    /// The feasible set of a completion problem is empty.
    #[error("infeasible completion problem: {0}")]
    Infeasible(String),

    /// Adaptive quadrature failed to reach the requested tolerance.
    /// Carries the last residual observed at the deepest refinement level.
    #[error("quadrature did not converge: residual {residual} after depth {depth}")]
    QuadratureNonConvergence { residual: f64, depth: usize },

    /// A text file failed to parse; `line` is 1-based.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
