use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed or out-of-range input data.
    Input,
    /// Factorization failures, unsupported regimes, missing closed forms.
    Numerical,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("non-finite value at position {index}")]
    NonFinite { index: usize },

    #[error("window of length {len} is too short (need at least {min})")]
    WindowTooShort { len: usize, min: usize },

    #[error("order {order} outside supported range 1..={max}")]
    OrderOutOfRange { order: usize, max: usize },

    #[error("not a permutation of 0..={0}")]
    InvalidPermutation(usize),

    #[error("pattern index {index} out of range for order {order}")]
    IndexOutOfRange { order: usize, index: u64 },

    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    #[error("covariance table: {0}")]
    InvalidTable(String),

    #[error("no closed form for order {order}")]
    NotClosedForm { order: usize },

    #[error("out of regime: {0}")]
    OutOfRegime(String),

    #[error("series of length {len} too short (need at least {needed})")]
    SeriesTooShort { len: usize, needed: usize },

    #[error("too few Monte Carlo samples: {got} (need at least {min})")]
    TooFewSamples { got: usize, min: usize },

    #[error("pattern probability unknown: no closed form and no oracle estimate supplied")]
    MissingProbability,

    #[error("model has no long-range dependence parameters")]
    MissingLrdParams,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::NotPositiveDefinite { .. }
            | Error::NotClosedForm { .. }
            | Error::OutOfRegime(_)
            | Error::MissingProbability
            | Error::MissingLrdParams => ErrorClass::Numerical,
            _ => ErrorClass::Input,
        }
    }
}
