use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by matrix construction, divergence functions and solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("entry ({row}, {col}) is out of range for a {nrows}x{ncols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        nrows: usize,
        ncols: usize,
    },
    #[error("non-finite value at position {0}")]
    NonFiniteValue(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("negative input at index {0}")]
    NegativeInput(usize),
    #[error("vector is not on the probability simplex (sum = {0})")]
    NotOnSimplex(f64),
    #[error("divergence is infinite")]
    InfiniteDivergence,
    #[error("column {0} has no nonzero entries")]
    ZeroColumn(usize),
    #[error("right-hand side entry {0} is negative")]
    NonPositiveRhs(usize),
    #[error("matrix entry ({row}, {col}) is negative")]
    NegativeEntry { row: usize, col: usize },
    #[error("row {0} of A·1 is zero while b is not positive there; no shift exists")]
    UnshiftableRow(usize),
    #[error("component {0} of the current image A x is zero")]
    ZeroDenominator(usize),
    #[error("initial guess component {0} is not positive after shifting")]
    NonPositiveStart(usize),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("dense oracle limited to dimension {limit}, got {dim}")]
    TooLargeForDense { dim: usize, limit: usize },
    #[error("matrix is {nrows}x{ncols}, expected square")]
    NotSquare { nrows: usize, ncols: usize },
    #[error("diagonal entry {0} is zero")]
    ZeroDiagonal(usize),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("p^T A p <= 0 at iteration {iteration}; matrix is not positive definite")]
    IndefiniteBreakdown { iteration: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
}
