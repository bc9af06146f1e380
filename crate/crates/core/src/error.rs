use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("arc `{0}` is not defined for this domain")]
    InvalidArc(String),
    #[error("event does not apply to this domain: {0}")]
    DomainMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("state space too large: {0}")]
    TooLarge(String),
    #[error("algorithm does not determine the function: {0}")]
    NotExact(String),
    #[error("exploration failed: {0}")]
    Oracle(String),
    #[error("insufficient data: {0}")]
    Insufficient(String),
}

pub type Result<T> = std::result::Result<T, Error>;
