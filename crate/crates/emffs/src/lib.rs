//! File formats, reports and the command-line pipeline around
//! [`emffs_core`].
//!
//! The core crate holds every algorithm and never touches the file system.
//! This crate adds NSL-KDD loaders (CSV and ARFF), text formats for each
//! intermediate artifact, JSON and CSV reports, rayon-parallel versions of
//! the expensive fitting steps, and the stepwise pipeline driven by the
//! `emffs` binary.

#![forbid(unsafe_code)]

pub mod arff;
pub mod config;
pub mod formats;
pub mod nslkdd;
pub mod parallel;
pub mod pipeline;
pub mod report;

mod builder;

pub use config::{DataFormat, RunConfig};
pub use emffs_core as core;

/// Errors raised while reading or writing files.
#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("row {row}: {message}")]
    Row { row: u64, message: String },
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] emffs_core::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl FormatError {
    pub(crate) fn row(row: u64, message: impl Into<String>) -> Self {
        FormatError::Row {
            row,
            message: message.into(),
        }
    }

    pub(crate) fn line(line: usize, message: impl Into<String>) -> Self {
        FormatError::Line {
            line,
            message: message.into(),
        }
    }
}

pub type FormatResult<T> = Result<T, FormatError>;
