use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors produced anywhere in the feature-extraction / ensemble pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("empty dataset: {0}")]
    EmptyDataset(String),

    #[error("matrix is not symmetric: max |s - s^T| = {max_asymmetry:e} exceeds {tolerance:e}")]
    Symmetry { max_asymmetry: f64, tolerance: f64 },

    #[error("jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_diagonal:e})")]
    Convergence { sweeps: usize, off_diagonal: f64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("block grid {grid_rows}x{grid_cols} does not divide image shape {rows}x{cols}")]
    BlockGrid {
        rows: usize,
        cols: usize,
        grid_rows: usize,
        grid_cols: usize,
    },

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("label {label} is out of range for {classes} classes")]
    Label { label: usize, classes: usize },

    #[error("index {index} is out of range (len {len})")]
    Index { index: usize, len: usize },

    #[error("split error: class '{0}' has no training samples after the split")]
    Split(String),

    #[error("cannot access {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("format error at byte {offset}: {message}")]
    Format { offset: usize, message: String },

    #[error("unsupported model format version '{found}' (expected '{expected}')")]
    Version { found: String, expected: String },
}

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn format(offset: usize, msg: impl Into<String>) -> Self {
        Error::Format {
            offset,
            message: msg.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
