//! Decoded column-1 states and the logical Z measurement used by decryption.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::pauli::{packed_get, packed_set, PauliLabel};

/// Branches with probability at or below this are treated as impossible.
pub const ZERO_PROBABILITY: f64 = 1e-13;

/// A `p`-qubit state after unpermuting and decoding.
#[derive(Clone, Debug, PartialEq)]
pub enum LogicalState {
    Dense(DensityMatrix),
    /// `(1/2^p) Σ c_v σ_v` over packed label vectors.
    Pauli { rows: usize, terms: BTreeMap<u64, f64> },
}

/// Outcome probabilities and renormalized post-measurement states.
#[derive(Clone, Debug)]
pub struct ZMeasurement {
    pub prob_plus: f64,
    pub post_plus: Option<LogicalState>,
    pub post_minus: Option<LogicalState>,
}

impl ZMeasurement {
    pub fn prob_minus(&self) -> f64 {
        1.0 - self.prob_plus
    }
}

impl LogicalState {
    pub fn rows(&self) -> usize {
        match self {
            LogicalState::Dense(rho) => rho.num_qubits(),
            LogicalState::Pauli { rows, .. } => *rows,
        }
    }

    fn check_row(&self, row: usize) -> Result<()> {
        if row >= self.rows() {
            return Err(Error::IndexOutOfRange(format!("row {row} of {}", self.rows())));
        }
        Ok(())
    }

    /// Z measurement on `row`; the `+1` outcome projects onto `|0⟩`.
    pub fn measure_z(&self, row: usize) -> Result<ZMeasurement> {
        self.check_row(row)?;
        let (prob_plus, plus, minus) = match self {
            LogicalState::Dense(rho) => {
                let bit = 1usize << row;
                let prob_plus: f64 = (0..rho.dim()).filter(|i| i & bit == 0).map(|i| rho.get(i, i).re).sum();
                let project = |keep: usize, prob: f64| {
                    let m = rho.matrix().map_with_location(|i, j, v| {
                        if i & bit == keep && j & bit == keep {
                            v / prob
                        } else {
                            Complex64::new(0.0, 0.0)
                        }
                    });
                    DensityMatrix::from_matrix(m).map(LogicalState::Dense)
                };
                let prob_minus = 1.0 - prob_plus;
                let plus = (prob_plus > ZERO_PROBABILITY).then(|| project(0, prob_plus)).transpose()?;
                let minus = (prob_minus > ZERO_PROBABILITY).then(|| project(bit, prob_minus)).transpose()?;
                (prob_plus, plus, minus)
            }
            LogicalState::Pauli { rows, terms } => {
                let z_key = packed_set(0, row, PauliLabel::Z);
                let prob_plus = (1.0 + terms.get(&z_key).copied().unwrap_or(0.0)) / 2.0;
                let prob_minus = 1.0 - prob_plus;
                let mut plus = BTreeMap::new();
                let mut minus = BTreeMap::new();
                for (&key, &c_i) in terms.iter() {
                    if packed_get(key, row) != PauliLabel::I {
                        continue;
                    }
                    let zk = packed_set(key, row, PauliLabel::Z);
                    let c_z = terms.get(&zk).copied().unwrap_or(0.0);
                    let (p_val, m_val) = ((c_i + c_z) / 2.0, (c_i - c_z) / 2.0);
                    plus.insert(key, p_val);
                    plus.insert(zk, p_val);
                    minus.insert(key, m_val);
                    minus.insert(zk, -m_val);
                }
                // terms with Z at the row but no I partner
                for (&key, &c_z) in terms.iter() {
                    if packed_get(key, row) != PauliLabel::Z {
                        continue;
                    }
                    let ik = packed_set(key, row, PauliLabel::I);
                    if !terms.contains_key(&ik) {
                        plus.insert(ik, c_z / 2.0);
                        plus.insert(key, c_z / 2.0);
                        minus.insert(ik, -c_z / 2.0);
                        minus.insert(key, c_z / 2.0);
                    }
                }
                let finish = |map: BTreeMap<u64, f64>, prob: f64| LogicalState::Pauli {
                    rows: *rows,
                    terms: map.into_iter().filter(|(_, c)| *c != 0.0).map(|(k, c)| (k, c / prob)).collect(),
                };
                let plus = (prob_plus > ZERO_PROBABILITY).then(|| finish(plus, prob_plus));
                let minus = (prob_minus > ZERO_PROBABILITY).then(|| finish(minus, prob_minus));
                (prob_plus, plus, minus)
            }
        };
        Ok(ZMeasurement {
            prob_plus,
            post_plus: plus,
            post_minus: minus,
        })
    }

    /// Reduced density matrix on `rows`; qubit `j` of the result is `rows[j]`.
    pub fn reduce(&self, rows: &[usize]) -> Result<DensityMatrix> {
        for &r in rows {
            self.check_row(r)?;
        }
        match self {
            LogicalState::Dense(rho) => rho.partial_trace_keep(rows),
            LogicalState::Pauli { terms, .. } => {
                let mut mask = 0u64;
                for &r in rows {
                    mask |= 3u64 << (2 * r);
                }
                let kept = terms.iter().filter(|(&k, _)| k & !mask == 0).map(|(&k, &c)| {
                    let local = rows
                        .iter()
                        .enumerate()
                        .fold(0u64, |acc, (j, &r)| packed_set(acc, j, packed_get(k, r)));
                    (local, c)
                });
                DensityMatrix::from_pauli_terms(rows.len(), kept)
            }
        }
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        let all: Vec<usize> = (0..self.rows()).collect();
        self.reduce(&all)
    }
}
