use thiserror::Error;

/// Crate-wide error type. Variants mirror the failure modes of the exact
/// pipeline; none of them is recoverable by retrying with the same input.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("profile inconsistent: {0}")]
    ProfileInconsistent(String),
    #[error("not a prime power: {0}")]
    NotPrimePower(u64),
    #[error("modulus not prime: {0}")]
    ModulusNotPrime(u64),
    #[error("instance too large: {0}")]
    InstanceTooLarge(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("missing value at {0}")]
    MissingValue(String),
    #[error("truncation overflow: {0}")]
    TruncationOverflow(String),
    #[error("illegal cocycle support: {0}")]
    IllegalCocycleSupport(String),
    #[error("truncation too small: {0}")]
    TruncationTooSmall(String),
    #[error("unsupported rank: {0}")]
    UnsupportedRank(usize),
    #[error("unsupported operator index: {0}")]
    UnsupportedOperator(u8),
    #[error("system singular: {0}")]
    SystemSingular(String),
    #[error("singular transition matrix")]
    SingularTransition,
    #[error("invalid rational literal: {0:?}")]
    InvalidRational(String),
}

pub type Result<T> = std::result::Result<T, Error>;
