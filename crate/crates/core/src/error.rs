use thiserror::Error;

/// Errors produced by the frame, operator-space and experiment routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("vectors do not span the ambient space (rank {rank} < {dim})")]
    NotAFrame { rank: usize, dim: usize },

    #[error("frame operator is numerically singular (lambda_min / lambda_max = {ratio:e})")]
    Singular { ratio: f64 },

    #[error("covariance matrix is not symmetric positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsdCovariance { min_eigenvalue: f64 },

    #[error("operator is not Hermitian (max |M - M^H| = {drift:e})")]
    NotHermitian { drift: f64 },

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("Bloch vector has norm {0} > 1")]
    OutsideBlochBall(f64),

    #[error("invalid probability vector: {0}")]
    InvalidProbability(String),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error(
        "POVM element {index} has trace {trace:e}; traceless representation needs positive traces"
    )]
    ZeroTraceElement { index: usize, trace: f64 },

    #[error("invalid Platonic weights: {0}")]
    InvalidWeights(String),

    #[error("rotation is not in SO(3): {0}")]
    InvalidRotation(String),

    #[error("Q-frame is not tight (residual {residual:e})")]
    NotTight { residual: f64 },

    #[error("Q-frame is not equal-norm (norms {norms:?})")]
    NotEqualNorm { norms: Vec<f64> },

    #[error(
        "{count} count vectors exceed the enumeration cap {cap}; use the Monte Carlo estimator"
    )]
    EnumerationCapExceeded { count: u128, cap: u128 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
