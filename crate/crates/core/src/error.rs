use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("all x values are identical; slope is not identifiable")]
    RankDeficient,

    #[error("no model in the family keeps every prediction strictly positive: {0}")]
    Infeasible(String),

    #[error("column `{column}` not found in {path}")]
    MissingColumn { path: PathBuf, column: String },

    #[error("{path}: data row {row} (line {line}), column `{column}`: cannot parse `{value}` as a number")]
    Parse {
        path: PathBuf,
        row: usize,
        line: usize,
        column: String,
        value: String,
    },

    #[error("{path}: data row {row} (line {line}), column `{column}`: {message}")]
    Validation {
        path: PathBuf,
        row: usize,
        line: usize,
        column: String,
        message: String,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
