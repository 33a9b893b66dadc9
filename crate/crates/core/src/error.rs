use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A field declared as a weight has nonpositive or nonfinite cells.
    #[error("not a weight: {0}")]
    NotAWeight(String),

    /// Malformed configuration. The string points into the offending field.
    #[error("config error: {0}")]
    Config(String),

    /// A hypothesis scan refused a verification run.
    #[error("hypothesis failed: {0}")]
    Hypothesis(String),

    /// A numeric contract was violated (signals a bug upstream).
    #[error("property failure: {0}")]
    Property(String),

    /// Internal structural inconsistency (e.g. empty principal set with a
    /// nonempty index family).
    #[error("structural error: {0}")]
    Structural(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
