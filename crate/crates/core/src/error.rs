use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero in ℚ(q)")]
    DivisionByZero,
    #[error("pole at q₀ = {0}")]
    PoleAtQ(String),
    #[error("non-expandable factor: {0}")]
    NonExpandable(String),
    #[error("pole hit: {0}")]
    PoleHit(String),
    #[error("insufficient truncation: bound {bound} exceeds validity {validity}")]
    InsufficientTruncation { bound: i64, validity: String },
    #[error("alphabet mixing: {0}")]
    AlphabetMixing(String),
    #[error("variable count mismatch: {0} vs {1}")]
    VariableCount(usize, usize),
    #[error("expansion domains differ")]
    DomainMismatch,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("singular matrix")]
    Singular,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
