use thiserror::Error;

/// Errors raised by covariance-matrix algebra, state construction and the oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NonSymmetric(f64),

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("covariance matrix violates the uncertainty relation (min symplectic eigenvalue {0})")]
    NotPhysical(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix of size {0} is not a 2n x 2n covariance matrix")]
    BadShape(usize),

    #[error("standard-form reduction has no real solution (discriminant {0:e})")]
    DegenerateBlocks(f64),

    #[error("sum of covariance matrices is singular (det {0:e})")]
    SingularSum(f64),

    #[error("negative thermal occupancy {0}")]
    NegativeOccupancy(f64),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("state is outside the symmetric |d| = c family: {0}")]
    OutOfFamily(String),

    #[error("oracle did not converge: best starts disagree by {spread:e}")]
    NotConverged { spread: f64 },

    #[error("Fock truncation insufficient: tail {tail:e} above bound at cutoff {cutoff}")]
    TruncationInsufficient { cutoff: usize, tail: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
