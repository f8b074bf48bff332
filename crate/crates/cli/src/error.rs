use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: {message}")]
    Dump { path: PathBuf, message: String },
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error(transparent)]
    Core(#[from] twcq::Error),
}

/// Problems reading a saved system, tagged with the file section at fault.
#[derive(Debug, Error, PartialEq)]
pub enum LoadError {
    #[error("not a saved system: {0}")]
    Syntax(String),
    #[error("unsupported format version {found} (expected {expected})")]
    Version { found: i64, expected: i64 },
    #[error("[{section}] is missing")]
    Missing { section: &'static str },
    #[error("[{section}] is malformed: {message}")]
    Malformed {
        section: &'static str,
        message: String,
    },
    #[error("[{section}] violates an invariant: {message}")]
    Invariant {
        section: &'static str,
        message: String,
    },
}

impl LoadError {
    /// Section of the file the error points at, when there is one.
    pub fn section(&self) -> Option<&'static str> {
        match self {
            LoadError::Missing { section }
            | LoadError::Malformed { section, .. }
            | LoadError::Invariant { section, .. } => Some(section),
            LoadError::Version { .. } => Some("format"),
            LoadError::Syntax(_) => None,
        }
    }
}

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
    let path = path.into();
    move |source| CliError::Io { path, source }
}

pub(crate) fn csv_err(path: impl Into<PathBuf>) -> impl FnOnce(csv::Error) -> CliError {
    let path = path.into();
    move |source| CliError::Csv { path, source }
}
