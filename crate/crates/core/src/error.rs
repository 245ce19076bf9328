use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("vector has a coordinate outside the slice: {0}")]
    OutsideSlice(String),

    #[error("truncation: {0}")]
    Truncation(String),

    #[error("degree mismatch: monomial has degree {found}, expected {expected}")]
    DegreeMismatch { expected: String, found: String },

    #[error("step budget of {0} exhausted")]
    StepBudget(usize),

    #[error("quotient not built: {0}")]
    MissingQuotient(String),

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
