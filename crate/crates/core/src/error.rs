use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WalkError {
    #[error("cube dimension must be at least 1")]
    ZeroDimension,

    #[error("cube dimension {0} exceeds the 63-bit vertex encoding")]
    DimensionTooLarge(usize),

    #[error("coin dimension {coin_dim} is invalid for an {n}-cube (expected n or n+1)")]
    InvalidCoinDimension { n: usize, coin_dim: usize },

    #[error("invalid bitstring {0:?}: expected only '0' and '1'")]
    InvalidBitstring(String),

    #[error("bitstring has {got} bits, expected {expected}")]
    BitstringLength { expected: usize, got: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("direct engine is limited to n <= {max}, requested n = {n}")]
    DirectEngineTooLarge { n: usize, max: usize },

    #[error("analytic engine only covers corner-to-corner walks (target must be the complement of the start)")]
    AnalyticTargetUnsupported,

    #[error("probability {0} outside the admissible range")]
    InvalidProbability(f64),

    #[error("exact hitting time for n = {n} overflows (limit {max})")]
    HittingOverflow { n: usize, max: usize },
}

pub type Result<T> = std::result::Result<T, WalkError>;
