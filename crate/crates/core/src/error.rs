use thiserror::Error;

/// Errors raised by the engine. The variant name doubles as the stable error
/// name reported by the CLI and the C ABI.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("InvalidInput: {0}")]
    InvalidInput(String),
    #[error("InvalidChart: {0}")]
    InvalidChart(String),
    #[error("RankMismatch: expected rank {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("Unsupported: {0}")]
    Unsupported(String),
    #[error("ZeroCurrent: the zero vector has no normalization")]
    ZeroCurrent,
    #[error("NotRealizable: {0}")]
    NotRealizable(String),
    #[error("ChartMismatch: {0}")]
    ChartMismatch(String),
    #[error("NotInjective: {0}")]
    NotInjective(String),
    #[error("WindowExhausted: no window up to length {max_window} passed validation")]
    WindowExhausted { max_window: usize },
    #[error("LevelTooLow: need level {needed}, got {got}")]
    LevelTooLow { needed: usize, got: usize },
    #[error("Io: {0}")]
    Io(String),
}

impl Error {
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "InvalidInput",
            Error::InvalidChart(_) => "InvalidChart",
            Error::RankMismatch { .. } => "RankMismatch",
            Error::Unsupported(_) => "Unsupported",
            Error::ZeroCurrent => "ZeroCurrent",
            Error::NotRealizable(_) => "NotRealizable",
            Error::ChartMismatch(_) => "ChartMismatch",
            Error::NotInjective(_) => "NotInjective",
            Error::WindowExhausted { .. } => "WindowExhausted",
            Error::LevelTooLow { .. } => "LevelTooLow",
            Error::Io(_) => "Io",
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::InvalidInput(format!("json: {e}"))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
