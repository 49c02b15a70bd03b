use std::path::PathBuf;

use thiserror::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_DATA: u8 = 3;
pub const EXIT_INTERNAL: u8 = 4;
pub const EXIT_PORT_IN_USE: u8 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    PortInUse(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn input(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        CliError::Input { path: path.into(), message: message.to_string() }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Input { .. } | CliError::Data(_) => EXIT_DATA,
            CliError::PortInUse(_) => EXIT_PORT_IN_USE,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl From<tracegrow_core::EngineError> for CliError {
    fn from(e: tracegrow_core::EngineError) -> Self {
        match e {
            tracegrow_core::EngineError::InvalidConfig(_) => CliError::Usage(e.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<tracegrow_core::EvalError> for CliError {
    fn from(e: tracegrow_core::EvalError) -> Self {
        CliError::Data(e.to_string())
    }
}
