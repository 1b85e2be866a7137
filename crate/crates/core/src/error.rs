use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller broke an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("index {index} out of range for instance of length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("scripted response stream exhausted after {consumed} answers")]
    ScriptExhausted { consumed: usize },

    #[error("exact enumeration refused: {0}")]
    StateCapExceeded(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// An internal consistency check failed.
    #[error("invariant violation: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    /// Process exit code for the CLI: 2 for configuration problems, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Contract(_)
            | Error::IndexOutOfRange { .. }
            | Error::Config(_)
            | Error::StateCapExceeded(_) => 2,
            Error::ScriptExhausted { .. } | Error::Invariant(_) => 3,
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => 2,
        }
    }
}
