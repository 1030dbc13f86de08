//! Top-level error type mapped onto process exit codes.

use std::path::PathBuf;

use thiserror::Error;

/// Exit codes: 0 ok, 1 internal error, 2 missing input, 3 bad config.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config at {field}: {message}")]
    Config { field: String, message: String },
    #[error("missing input artifact {path} — {hint}")]
    MissingInput { path: PathBuf, hint: String },
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 3,
            CliError::MissingInput { .. } => 2,
            CliError::Internal(_) => 1,
        }
    }

    pub fn internal(err: impl std::fmt::Display) -> Self {
        CliError::Internal(err.to_string())
    }

    pub fn missing(path: impl Into<PathBuf>, hint: impl Into<String>) -> Self {
        CliError::MissingInput {
            path: path.into(),
            hint: hint.into(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}
