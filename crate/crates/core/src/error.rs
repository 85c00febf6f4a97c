use thiserror::Error;

/// Errors raised when an input violates the preconditions of an operation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("bit sequence of length {len} is not a multiple of {bits_per_symbol}")]
    BitLength { len: usize, bits_per_symbol: u32 },
    #[error("bit values must be 0 or 1, got {0}")]
    NotABit(u8),
    #[error("symbol {0} is not a constellation point")]
    NotAPoint(num_complex::Complex64),
    #[error("at least two points are required, got {0}")]
    TooFewPoints(usize),
    #[error("invalid constellation: {0}")]
    InvalidConstellation(String),
    #[error("unknown constellation '{0}' (expected qpsk or 16qam)")]
    UnknownConstellation(String),
    #[error("power imbalance factor {0} outside [0.5, 1)")]
    InvalidAlpha(f64),
    #[error("correlation parameter {0} outside [0, 1]")]
    InvalidGamma(f64),
    #[error("noise variance must be positive and finite, got {0}")]
    InvalidNoise(f64),
    #[error("invalid sweep configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
