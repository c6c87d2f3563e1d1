use thiserror::Error;

/// Errors produced anywhere in the co-simulation pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A configuration value is missing, malformed or out of range.
    #[error("config error: {0}")]
    Config(String),

    /// Some slices could not be delivered within the trace horizon.
    #[error("infeasible delivery: slices {unfinished:?} not delivered within {horizon} slots")]
    Infeasible { unfinished: Vec<usize>, horizon: usize },

    /// The graph or engine state is inconsistent (cycle, deadlock, livelock).
    #[error("structural error: {0}")]
    Structural(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
