use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("scale mismatch: {0} vs {1}")]
    ScaleMismatch(u32, u32),
    #[error("invalid scale m={0}")]
    InvalidScale(u32),
    #[error("exponent {0} out of range")]
    ExponentOutOfRange(f64),
    #[error("invalid tube: {0}")]
    InvalidTube(String),
    #[error("empty set")]
    EmptySet,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
