use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExpError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Run(String),
}

impl ExpError {
    /// Machine-readable category printed on failure.
    pub fn category(&self) -> &'static str {
        match self {
            ExpError::Config(_) => "config",
            ExpError::Io { .. } => "io",
            ExpError::Run(_) => "run",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            ExpError::Config(_) => 2,
            ExpError::Io { .. } => 3,
            ExpError::Run(_) => 4,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        ExpError::Io {
            path: path.into(),
            source,
        }
    }
}

/// Configuration problems surface as config errors, everything else raised
/// while simulating as run errors.
impl From<bogd::TclError> for ExpError {
    fn from(e: bogd::TclError) -> Self {
        use bogd::TclError::*;
        match e {
            InvalidLoad { .. } | InvalidRange { .. } | InvalidConfig(_) | NonIntegerLockout { .. } => {
                ExpError::Config(e.to_string())
            }
            _ => ExpError::Run(e.to_string()),
        }
    }
}

impl From<bogd::RegretError> for ExpError {
    fn from(e: bogd::RegretError) -> Self {
        ExpError::Run(e.to_string())
    }
}

impl From<bogd::OcoError> for ExpError {
    fn from(e: bogd::OcoError) -> Self {
        ExpError::Run(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, ExpError>;
