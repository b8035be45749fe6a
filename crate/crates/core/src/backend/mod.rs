//! Interchangeable simulation engines for the encrypted grid.

pub mod codec;
pub mod dense;
pub mod logical;
pub mod pauli;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::params::Gamma;
use crate::pauli::GridIndex;
use crate::scheme::key::SecretKey;

pub use dense::{DenseCipher, GridOp, MixturePolicy};
pub use logical::{LogicalState, ZMeasurement};
pub use pauli::PauliCipher;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Exact dense oracle.
    Oracle,
    /// Pauli-coefficient propagation.
    Pauli,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Oracle => "oracle",
            Backend::Pauli => "pauli",
        })
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracle" | "dense" => Ok(Backend::Oracle),
            "pauli" => Ok(Backend::Pauli),
            other => Err(Error::InvalidParams(format!("unknown backend '{other}'"))),
        }
    }
}

/// Gates spent undoing the encryption, measured during decoding.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DecodeCost {
    pub u_dagger_cnots: usize,
    pub permutation_swaps: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CipherState {
    Dense(DenseCipher),
    Pauli(PauliCipher),
}

impl CipherState {
    pub fn gamma(&self) -> &Gamma {
        match self {
            CipherState::Dense(c) => c.gamma(),
            CipherState::Pauli(c) => c.gamma(),
        }
    }

    pub fn backend(&self) -> Backend {
        match self {
            CipherState::Dense(_) => Backend::Oracle,
            CipherState::Pauli(_) => Backend::Pauli,
        }
    }

    /// Reduced state of the encrypted grid on the given positions.
    pub fn reduced_state(&self, positions: &[GridIndex]) -> Result<DensityMatrix> {
        match self {
            CipherState::Dense(c) => c.reduced_state(positions),
            CipherState::Pauli(c) => c.reduced_state(positions),
        }
    }

    /// Several reduced states; the oracle computes them in one replay.
    pub fn reduced_states(&self, sets: &[Vec<GridIndex>]) -> Result<Vec<DensityMatrix>> {
        match self {
            CipherState::Dense(c) => c.reduced_states(sets),
            CipherState::Pauli(c) => sets.iter().map(|s| c.reduced_state(s)).collect(),
        }
    }

    pub fn decode(&self, key: &SecretKey) -> Result<(LogicalState, DecodeCost)> {
        match self {
            CipherState::Dense(c) => c.decode(key),
            CipherState::Pauli(c) => c.decode(key),
        }
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        codec::encode(self)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        codec::decode(bytes)
    }
}
