use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An operation was called outside its documented domain.
    #[error("{0}")]
    Precondition(String),
    #[error("degenerate ball")]
    DegenerateBall,
    #[error("ball too small")]
    BallTooSmall,
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precondition<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precondition(msg.into()))
}
