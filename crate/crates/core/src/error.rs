use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid layout: {0}")]
    InvalidLayout(String),

    /// The effective channel could not be inverted; callers usually skip
    /// the realization and count it.
    #[error("degenerate channel: {0}")]
    DegenerateChannel(String),

    #[error("degenerate sidelobe mask: {0}")]
    DegenerateMask(String),

    #[error("evaluation failed: {0}")]
    Evaluation(String),

    #[error("scenario: {0}")]
    Scenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
