//! Permutation-keyed quantum homomorphic encryption for Clifford+T circuits.
//!
//! Each logical qubit row is encoded into a random code by a CNOT ladder on
//! `n` columns, padded with `m` maximally mixed columns and hidden by a secret
//! column permutation. Clifford gates are evaluated transversally and T gates
//! by magic-state teleportation whose outcomes are read only at decryption.

pub mod audit;
pub mod backend;
pub mod bounds;
pub mod circuit;
pub mod density;
pub mod error;
pub mod gates;
pub mod params;
pub mod pauli;
pub mod permutation;
pub mod scheme;

pub use backend::{Backend, CipherState};
pub use circuit::{parse_circuit, Circuit, Gate};
pub use density::{trace_norm_distance, DensityMatrix};
pub use error::{Error, Result};
pub use params::Gamma;
pub use scheme::{decrypt, encrypt, evaluate, keygen, SecretKey};
