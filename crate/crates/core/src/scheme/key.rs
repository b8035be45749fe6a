//! Secret keys and the key file format.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::Gamma;
use crate::permutation::ColumnPermutation;

/// A column permutation `κ ∈ S_q`, with the seed that produced it when known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecretKey {
    perm: ColumnPermutation,
    seed: Option<u64>,
}

#[derive(Serialize, Deserialize)]
struct KeyFile {
    q: usize,
    perm: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

/// Uniform key over `S_q`, deterministic in `seed`.
pub fn keygen(gamma: &Gamma, seed: u64) -> SecretKey {
    keygen_for_columns(gamma.q(), seed)
}

/// Uniform key over `S_q` for an arbitrary column count.
pub fn keygen_for_columns(q: usize, seed: u64) -> SecretKey {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SecretKey {
        perm: ColumnPermutation::random(q, &mut rng),
        seed: Some(seed),
    }
}

pub fn keygen_with_rng<R: Rng + ?Sized>(gamma: &Gamma, rng: &mut R) -> SecretKey {
    SecretKey {
        perm: ColumnPermutation::random(gamma.q(), rng),
        seed: None,
    }
}

impl SecretKey {
    pub fn from_permutation(perm: ColumnPermutation) -> Self {
        SecretKey { perm, seed: None }
    }

    pub fn permutation(&self) -> &ColumnPermutation {
        &self.perm
    }

    pub fn q(&self) -> usize {
        self.perm.len()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Columns `κ([n])` holding the encoded data, sorted.
    pub fn code_columns(&self, n: usize) -> Vec<usize> {
        let mut cols: Vec<usize> = (0..n).map(|y| self.perm.apply(y)).collect();
        cols.sort_unstable();
        cols
    }

    pub fn check_gamma(&self, gamma: &Gamma) -> Result<()> {
        if self.q() != gamma.q() {
            return Err(Error::InvalidKey(format!(
                "key permutes {} columns but q = {}",
                self.q(),
                gamma.q()
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let file = KeyFile {
            q: self.q(),
            perm: self.perm.images().to_vec(),
            seed: self.seed,
        };
        serde_json::to_string(&file).expect("key serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: KeyFile = serde_json::from_str(text).map_err(|e| Error::InvalidKey(e.to_string()))?;
        if file.perm.len() != file.q {
            return Err(Error::InvalidKey(format!(
                "q = {} but perm has {} entries",
                file.q,
                file.perm.len()
            )));
        }
        Ok(SecretKey {
            perm: ColumnPermutation::from_images(file.perm)?,
            seed: file.seed,
        })
    }
}
