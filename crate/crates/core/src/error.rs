use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GrnError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("network has no TF genes")]
    NoTfGenes,
    #[error("network has no P genes")]
    NoPGenes,
    #[error("genome parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, GrnError>;

pub(crate) fn invalid(msg: impl Into<String>) -> GrnError {
    GrnError::InvalidArgument(msg.into())
}
