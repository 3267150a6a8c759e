//! Error type shared by all modules.

use thiserror::Error;

/// Errors produced by matrix primitives, statistical routines, and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// A factorization pivot fell at or below the scaled tolerance.
    #[error("matrix is not positive definite (pivot {pivot:.3e} at index {index}, tolerance {tol:.3e})")]
    NotPositiveDefinite { index: usize, pivot: f64, tol: f64 },

    /// Off-diagonal entries disagree beyond the symmetry tolerance.
    #[error("matrix is not symmetric: |m[{i}][{j}] - m[{j}][{i}]| = {deviation:.3e}")]
    NotSymmetric { i: usize, j: usize, deviation: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix order must be at least 1")]
    EmptyMatrix,

    /// The iterative eigensolver did not reach its convergence threshold.
    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    EigenNoConvergence { sweeps: usize, off_norm: f64 },

    /// The pair coincides with the null (0, I); the log likelihood ratio is
    /// identically zero and no threshold attains a level strictly inside (0, 1).
    #[error("degenerate likelihood ratio: the pair coincides with the null (0, I)")]
    DegenerateLr,

    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: u64, got: u64 },

    #[error("level must lie strictly inside (0, 1), got {0}")]
    InvalidAlpha(f64),

    #[error("parameter out of range: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
