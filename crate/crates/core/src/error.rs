use std::path::PathBuf;

/// Errors produced anywhere in the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid window: length {window} for data of length {len}")]
    InvalidWindow { window: usize, len: usize },

    #[error("shape mismatch: expected {expected}, found {found}")]
    Shape { expected: usize, found: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("need more than {k} points for a {k}-NN scale, got {points}")]
    InsufficientPoints { k: usize, points: usize },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("degenerate split: {0}")]
    DegenerateSplit(String),

    #[error("parse error in {path:?} at line {line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error on {path:?}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the command line tool: 2 for configuration
    /// problems, 3 for everything caused by the data.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Json(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
