use std::path::PathBuf;

use thiserror::Error;

/// Errors produced across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty cell")]
    EmptyCell,

    #[error("degenerate split: one daughter cell is empty")]
    DegenerateSplit,

    #[error("cells do not partition the parent: {0}")]
    NotAPartition(String),

    #[error("invalid config: field `{field}`: {reason}")]
    InvalidConfig { field: String, reason: String },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("dimension mismatch: expected {expected} features, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{path}: file is empty")]
    EmptyFile { path: PathBuf },

    #[error("missing column `{0}`")]
    MissingColumn(String),

    #[error("target column `{column}` is not numeric (row {row}: `{value}`)")]
    NonNumericTarget { column: String, row: usize, value: String },

    #[error("row {row}: cannot parse `{value}` in column `{column}`")]
    MalformedCell { row: usize, column: String, value: String },

    #[error("line {line}: {reason}")]
    ConfigSyntax { line: usize, reason: String },

    #[error("unsupported forest format version {found} (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by user-supplied configuration rather than runtime failures.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidConfig { .. } | Error::ConfigSyntax { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
