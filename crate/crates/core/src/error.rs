use thiserror::Error;

use crate::circuit::{CircuitError, Violation};

/// Errors raised by the scheme, the simulation backends and the audits.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error(transparent)]
    Circuit(#[from] CircuitError),

    #[error("circuit does not fit the parameters: {}", join_violations(.0))]
    CircuitMismatch(Vec<Violation>),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{what} exceeds the simulation guard ({value} > {limit})")]
    GuardExceeded {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("invalid key: {0}")]
    InvalidKey(String),

    #[error("malformed ciphertext: {0}")]
    Decode(String),

    #[error("encoded structure violated: {0}")]
    Structure(String),

    #[error("numeric failure: {0}")]
    Numeric(String),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
