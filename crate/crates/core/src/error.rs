use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Two vectors that must be combined component-wise have different lengths.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    /// Input is well-formed but carries no usable mass (empty group, all-zero needs).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A value lies outside its allowed domain (negative need, probability > 1, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A member set cannot be split as requested.
    #[error("partition error: {0}")]
    Partition(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error in {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Configuration-class failures map to exit code 2 in the CLI.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Json { .. } | Error::Io { .. })
    }
}
