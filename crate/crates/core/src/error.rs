use thiserror::Error;

/// Errors raised by space, frame and operator construction.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mass at atom {index} is not strictly positive: {mass}")]
    NonPositiveMass { index: usize, mass: f64 },
    #[error("duplicate atom label {0}")]
    DuplicateLabel(usize),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("wrong measure space kind: expected {expected}")]
    WrongSpaceKind { expected: &'static str },
    #[error("wrong frame family: expected {expected}")]
    WrongFrameKind { expected: &'static str },
    #[error("point {0} is not in the space or outside the family's domain")]
    PointOutOfDomain(String),
    #[error("vector pair is not orthonormal (defect {defect:e})")]
    NotOrthonormal { defect: f64 },
    #[error("dyadic partition of level {space} is too coarse for Haar scale {scale}")]
    PartitionTooCoarse { space: u32, scale: i32 },
    #[error("truncated Gaussian quadrature too coarse: Gram defect {defect:e} exceeds {tol:e}")]
    TruncationTooLarge { defect: f64, tol: f64 },
    #[error("normalization N(x) vanishes at {0}; coherent state undefined")]
    ZeroNormalization(String),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("operator is not hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("no upper symbol exists for this target (residual {residual:e})")]
    InconsistentSystem { residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
