//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("field mismatch: operands belong to different fields")]
    FieldMismatch,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("polynomial is not monic: leading digit must be 1")]
    NotMonic,

    #[error("digit {digit} out of range for q = {q}")]
    DigitOutOfRange { digit: u64, q: u64 },

    #[error("empty polynomial string")]
    EmptyPoly,

    #[error("constant polynomial not allowed here")]
    ConstantInput,

    #[error("division by zero polynomial")]
    ZeroDivisor,

    #[error("zero modulus")]
    ZeroModulus,

    #[error("prime table covers degree {have} but degree {need} is required")]
    TableTooSmall { need: u32, have: u32 },

    #[error("cache format error: {0}")]
    VersionMismatch(String),

    #[error("cache count mismatch at degree {degree}: expected {expected}, found {actual}")]
    CountMismatch {
        degree: u32,
        expected: u64,
        actual: u64,
    },

    #[error("invalid subset spec: {0}")]
    InvalidSubset(String),

    #[error("subset has no defined natural density")]
    DensityUndefined,

    #[error("weight undefined at x = {0}")]
    WeightUndefined(u64),

    #[error("invalid divisor profile: {0}")]
    InvalidProfile(String),

    #[error("enumeration at degree {degree} exceeds the configured ceiling {ceiling}")]
    CeilingExceeded { degree: u32, ceiling: u32 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
