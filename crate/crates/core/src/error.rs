use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or argument lies outside the space it is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    /// An internal invariant was violated by the caller.
    #[error("logic error: {0}")]
    Logic(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// Malformed or inconsistent input data (networks, traces, truth files).
    #[error("data error: {0}")]
    Data(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Whether this error stems from the user's configuration rather than
    /// the data they supplied.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_))
    }
}
