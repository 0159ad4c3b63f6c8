use thiserror::Error;

/// Errors raised by state construction, marginal extraction and the certifier.
#[derive(Debug, Error)]
pub enum Error {
    /// A subsystem label is unknown to the state it is applied to.
    #[error("unknown subsystem label `{0}`")]
    Label(String),

    /// A malformed argument: wrong shapes, empty sets, non-unitary input, ...
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A marginal configuration the certifier cannot handle.
    #[error("unsupported marginal configuration: {0}")]
    UnsupportedConfig(String),

    /// The input violates a genericity assumption (e.g. Schmidt rank deficit).
    #[error("state is not generic: {0}")]
    NotGeneric(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
