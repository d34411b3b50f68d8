//! Error type shared across the crate, plus the CLI exit-code mapping.

use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("file not found: {0}")]
    FileNotFound(PathBuf),

    #[error("ragged csv: data row {row} has {found} columns, expected {expected}")]
    RaggedRows {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("invalid label {value:?} at data row {row}: labels must be +1 or -1")]
    InvalidLabel { row: usize, value: String },

    #[error("point is not on the unit sphere (norm {norm}{})",
            .row.map(|r| format!(", data row {r}")).unwrap_or_default())]
    NotOnSphere { row: Option<usize>, norm: f64 },

    #[error("dataset contains no data rows")]
    EmptyDataset,

    #[error("dual measure has no atoms")]
    EmptyMeasure,

    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),

    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("model has zero weight vector; margin is undefined")]
    ZeroWeights,

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 for configuration problems, 3 for
    /// data problems, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidParameter(_) => 2,
            Error::FileNotFound(_)
            | Error::RaggedRows { .. }
            | Error::InvalidLabel { .. }
            | Error::NotOnSphere { .. }
            | Error::EmptyDataset
            | Error::GeometryMismatch(_)
            | Error::UnsupportedDimension(_)
            | Error::DegenerateData(_) => 3,
            _ => 1,
        }
    }
}
