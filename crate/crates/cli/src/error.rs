use std::io;

use qhe_core::Error;
use qhe_net::ClientError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Guard(String),
    #[error("{0}")]
    Violation(String),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("network: {0}")]
    Net(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Guard(_) => 3,
            CliError::Violation(_) => 4,
            CliError::Io(_) | CliError::Net(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::GuardExceeded { .. } => CliError::Guard(format!("{e}; reduce p = b(r+t) or q = n+m")),
            Error::Numeric(_) | Error::Structure(_) => CliError::Violation(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<qhe_core::circuit::CircuitError> for CliError {
    fn from(e: qhe_core::circuit::CircuitError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<ClientError> for CliError {
    fn from(e: ClientError) -> Self {
        match e {
            ClientError::Scheme(inner) => inner.into(),
            other => CliError::Net(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}
