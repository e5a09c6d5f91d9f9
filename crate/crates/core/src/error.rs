use thiserror::Error;

use crate::spin_numerics::HalfInt;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid spin value `{0}`")]
    InvalidSpin(String),
    #[error("(-1)^({0}) is undefined for a non-integer exponent")]
    NonIntegerExponent(HalfInt),
    #[error("projection m = {m} is not valid for spin {s}")]
    InvalidProjection { s: HalfInt, m: HalfInt },
    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NonHermitian(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("dimension {dim} exceeds the configured cap {cap}")]
    CapExceeded { dim: usize, cap: usize },
    #[error("invalid tolerance configuration: {0}")]
    InvalidTolerance(String),
    #[error("not a highest-weight state: {0}")]
    NotHighestWeight(String),
    #[error("preferred top state with j = {0} does not lie in the null space")]
    NotInNullSpace(HalfInt),
    #[error("no coupling supplied for multiplet `{0}`")]
    MissingCoupling(String),
    #[error("coupling for `{0}` must be strictly positive, got {1}")]
    NonPositiveCoupling(String, f64),
    #[error("invalid chain: {0}")]
    InvalidChain(String),
    #[error("symmetry-breaking amplitudes are all zero")]
    ZeroAlpha,
    #[error("operator fit residual {0:.3e} does not vanish")]
    FitResidual(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("numerical inconsistency: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
