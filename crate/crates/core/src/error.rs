use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("array is not a member of the {0} polytope")]
    NotMember(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("not a Latin square: {0}")]
    NotLatin(String),
    #[error("graph has no perfect matching")]
    NoPerfectMatching,
    #[error("construction failed: {0}")]
    ConstructionFailed(String),
    #[error("parse error: {0}")]
    Parse(String),
}
