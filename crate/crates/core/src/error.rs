use thiserror::Error;

/// Errors raised by the numerical kernels and the layers built on them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix contains a NaN or infinite entry")]
    NonFinite,
    #[error("{routine} did not converge within {iterations} iterations")]
    NoConvergence { routine: &'static str, iterations: usize },
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not Hermitian (asymmetry {asymmetry:e} exceeds {tolerance:e})")]
    NotHermitian { asymmetry: f64, tolerance: f64 },
    #[error("matrix has eigenvalue {eigenvalue:e} below the clamp threshold -{threshold:e}")]
    NegativeSpectrum { eigenvalue: f64, threshold: f64 },
    #[error("matrix is numerically singular (min singular value {min_singular:e} <= {tolerance:e})")]
    NotInvertible { min_singular: f64, tolerance: f64 },
    #[error("operator is not hyperbolic (eigenvalue modulus within {distance:e} of the unit circle)")]
    NotHyperbolic { distance: f64 },
    #[error("eigenvector basis condition number {condition:e} exceeds {threshold:e}")]
    IllConditionedEigenbasis { condition: f64, threshold: f64 },
    #[error("pseudo-orbit defect bound must be positive, got {0}")]
    InvalidDelta(f64),
    #[error("lambda must lie strictly inside (0, 1), got {0}")]
    InvalidLambda(f64),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("sequence length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("multiset size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("invalid ensemble spec: {0}")]
    InvalidSpec(String),
    #[error("invalid matrix file: {0}")]
    InvalidFormat(String),
}

pub type Result<T> = std::result::Result<T, Error>;
