//! Column permutations of the qubit grid.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bijection on `0..q`; `images[y]` is the image of column `y`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct ColumnPermutation {
    images: Vec<usize>,
}

impl ColumnPermutation {
    pub fn identity(q: usize) -> Self {
        ColumnPermutation { images: (0..q).collect() }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let q = images.len();
        let mut seen = vec![false; q];
        for &y in &images {
            if y >= q || std::mem::replace(&mut seen[y], true) {
                return Err(Error::InvalidKey(format!("{images:?} is not a permutation of 0..{q}")));
            }
        }
        Ok(ColumnPermutation { images })
    }

    /// Uniform over `S_q` (Fisher–Yates).
    pub fn random<R: Rng + ?Sized>(q: usize, rng: &mut R) -> Self {
        let mut images: Vec<usize> = (0..q).collect();
        images.shuffle(rng);
        ColumnPermutation { images }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    #[inline]
    pub fn apply(&self, y: usize) -> usize {
        self.images[y]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.images.len()];
        for (y, &img) in self.images.iter().enumerate() {
            inv[img] = y;
        }
        ColumnPermutation { images: inv }
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn compose(&self, first: &ColumnPermutation) -> Result<Self> {
        if self.len() != first.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: first.len(),
            });
        }
        Ok(ColumnPermutation {
            images: first.images.iter().map(|&y| self.images[y]).collect(),
        })
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &y)| i == y)
    }

    pub fn cycle_count(&self) -> usize {
        let mut seen = vec![false; self.len()];
        let mut cycles = 0;
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut y = start;
            while !seen[y] {
                seen[y] = true;
                y = self.images[y];
            }
        }
        cycles
    }

    /// Minimum number of swaps realizing the permutation: `q - cycles`.
    pub fn transposition_count(&self) -> usize {
        self.len() - self.cycle_count()
    }

    /// All `q!` permutations in lexicographic order of their image vectors.
    pub fn all(q: usize) -> Vec<ColumnPermutation> {
        let mut out = Vec::new();
        let mut images: Vec<usize> = (0..q).collect();
        loop {
            out.push(ColumnPermutation { images: images.clone() });
            if !next_permutation(&mut images) {
                break;
            }
        }
        out
    }
}

impl TryFrom<Vec<usize>> for ColumnPermutation {
    type Error = Error;

    fn try_from(images: Vec<usize>) -> Result<Self> {
        ColumnPermutation::from_images(images)
    }
}

impl From<ColumnPermutation> for Vec<usize> {
    fn from(p: ColumnPermutation) -> Vec<usize> {
        p.images
    }
}

/// Advances `v` to its next lexicographic arrangement; repeated values yield
/// each distinct arrangement once. Returns `false` after the last one.
pub fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        v.reverse();
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}
