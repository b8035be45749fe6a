//! Key generation, encryption, key-blind evaluation and decryption.

pub mod decrypt;
pub mod encoding;
pub mod identities;
pub mod input;
pub mod key;
pub mod schedule;

use serde::Serialize;

use crate::backend::{Backend, CipherState, DenseCipher, MixturePolicy, PauliCipher};
use crate::circuit::Circuit;
use crate::error::Result;
use crate::params::Gamma;

pub use decrypt::{decrypt, DecryptBranch, DecryptMode, DecryptResult, Decryption};
pub use encoding::{decoding_cnots, encoding_cnots, LadderOrder};
pub use input::{assemble_input, magic_density, magic_state, InputBlock, PlainState};
pub use key::{keygen, keygen_for_columns, keygen_with_rng, SecretKey};
pub use schedule::{transversal_schedule, RowOp};

/// `Enc_κ(τ)` on the chosen backend; the oracle enumerates every ancilla
/// assignment.
pub fn encrypt(key: &SecretKey, block: &InputBlock, backend: Backend) -> Result<CipherState> {
    encrypt_with(key, block, backend, MixturePolicy::Enumerate)
}

pub fn encrypt_with(key: &SecretKey, block: &InputBlock, backend: Backend, policy: MixturePolicy) -> Result<CipherState> {
    Ok(match backend {
        Backend::Oracle => CipherState::Dense(DenseCipher::encrypt(key, block, policy)?),
        Backend::Pauli => CipherState::Pauli(PauliCipher::encrypt(key, block)?),
    })
}

/// `Eval`: transversal gates on every column of every copy. Takes no key.
pub fn evaluate(circuit: &Circuit, ct: &CipherState) -> Result<CipherState> {
    let schedule = transversal_schedule(circuit, ct.gamma())?;
    let mut out = ct.clone();
    match &mut out {
        CipherState::Dense(c) => c.apply_schedule(&schedule),
        CipherState::Pauli(c) => c.apply_schedule(&schedule)?,
    }
    Ok(out)
}

/// Decoding cost from the parameters alone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GateCounts {
    pub u_dagger_cnots: usize,
    pub permutation_swaps_max: usize,
}

pub fn gate_counts(gamma: &Gamma) -> GateCounts {
    GateCounts {
        u_dagger_cnots: 2 * (gamma.n() - 1) * gamma.p(),
        permutation_swaps_max: (gamma.q() - 1) * gamma.p(),
    }
}
