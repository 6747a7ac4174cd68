use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("not a chain map: square fails in degree {degree}")]
    NotAChainMap { degree: i64 },
    #[error("not a cocycle in degree {degree}")]
    NotACocycle { degree: i64 },
    #[error("insufficient padding: window reaches total degree {requested} but only degrees up to {certified} are certified")]
    InsufficientPadding { requested: i64, certified: i64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("integer overflow: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;
