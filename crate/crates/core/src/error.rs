use std::io;

use thiserror::Error;

/// Errors raised while loading data, configuring runs, or clustering.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("input is empty")]
    EmptyInput,

    /// `row` is the zero-based index of the data row, `line` the one-based line number.
    #[error("line {line} (row {row}): expected {expected} fields, found {found}")]
    Ragged {
        row: usize,
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("index out of range: {0}")]
    Index(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("cluster {cluster} is empty")]
    DegenerateCluster { cluster: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
