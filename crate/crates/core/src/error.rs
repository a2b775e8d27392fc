use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    /// A required column is absent from the CSV header.
    #[error("schema error: missing required column `{column}`")]
    MissingColumn { column: String },

    /// `row` is the 1-based data row (the header is not counted).
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },

    #[error("model format error: {0}")]
    Format(String),

    #[error("unsupported model format_version {found} (this build reads version {supported})")]
    Version { found: u64, supported: u64 },

    #[error("fit error: {0}")]
    Fit(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("split error: {0}")]
    Split(String),

    #[error("shape mismatch: expected {expected}, got {actual}")]
    Shape { expected: usize, actual: usize },

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn fit(msg: impl Into<String>) -> Self {
        Error::Fit(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}
