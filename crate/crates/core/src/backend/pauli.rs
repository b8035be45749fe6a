//! Pauli-coefficient propagation in the encrypted frame.
//!
//! An encrypted state is `Σ_v c_v / 2^{pq} σ_{v on Y}`, where `σ_{v on Y}`
//! carries row label `v[x]` on every column of `Y = κ([n])` and identity on
//! the rest. Transversal gates map this family to itself, so a ciphertext
//! is the column set `Y` plus the coefficient map `v ↦ c_v`.

use std::collections::BTreeMap;

use super::logical::LogicalState;
use super::DecodeCost;
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::gates::CliffordGate;
use crate::params::Gamma;
use crate::pauli::{
    conjugate_cnot, conjugate_transversal_row, packed_get, packed_set, GridIndex, GridPauli, LogicalPauliVector,
    PauliLabel, Phase, MAX_PACKED_ROWS,
};
use crate::scheme::encoding::{decoding_cnots, encoding_cnots, LadderOrder};
use crate::scheme::input::InputBlock;
use crate::scheme::key::SecretKey;
use crate::scheme::schedule::RowOp;

/// Coefficients at or below this magnitude are dropped.
pub const COEFF_CUTOFF: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct PauliCipher {
    gamma: Gamma,
    columns: Vec<usize>,
    terms: BTreeMap<u64, f64>,
}

fn real_sign(phase: Phase, context: &str) -> Result<f64> {
    phase
        .sign()
        .ok_or_else(|| Error::Structure(format!("imaginary phase {:?} after {context}", phase)))
}

fn conjugate_ladder(g: &mut GridPauli, ladder: &[(usize, usize)]) -> Result<()> {
    for x in 0..g.rows() {
        for &(c, t) in ladder {
            g.conjugate_cnot(GridIndex::new(x, c), GridIndex::new(x, t))?;
        }
    }
    Ok(())
}

/// The row labels of `g` if it carries the same label on every column of
/// `columns` and identity elsewhere.
fn column_form(g: &GridPauli, columns: &[usize]) -> Option<LogicalPauliVector> {
    let mut labels = Vec::with_capacity(g.rows());
    for x in 0..g.rows() {
        let l = g.get(GridIndex::new(x, columns[0]));
        for y in 0..g.cols() {
            let expected = if columns.contains(&y) { l } else { PauliLabel::I };
            if g.get(GridIndex::new(x, y)) != expected {
                return None;
            }
        }
        labels.push(l);
    }
    Some(LogicalPauliVector::new(labels))
}

impl PauliCipher {
    /// Pushes every Pauli term of `τ ⊗ I` through `U` and `P_κ`, checking
    /// that each lands in the expected symmetric form.
    pub fn encrypt(key: &SecretKey, block: &InputBlock) -> Result<Self> {
        let gamma = *block.gamma();
        key.check_gamma(&gamma)?;
        if gamma.p() > MAX_PACKED_ROWS {
            return Err(Error::GuardExceeded {
                what: "rows of a packed label vector",
                value: gamma.p(),
                limit: MAX_PACKED_ROWS,
            });
        }
        let ladder = encoding_cnots(gamma.n(), LadderOrder::Ascending)?;
        let columns = key.code_columns(gamma.n());
        let mut terms = BTreeMap::new();
        for (v, c) in block.pauli_coefficients(COEFF_CUTOFF) {
            let logical = LogicalPauliVector::unpack(v, gamma.p());
            let mut g = GridPauli::from_column_vector(&logical, gamma.q(), &[0]);
            conjugate_ladder(&mut g, &ladder)?;
            let g = g.permute_columns(key.permutation())?;
            match column_form(&g, &columns) {
                Some(w) if w == logical => {
                    terms.insert(v, c * real_sign(g.phase(), "encoding")?);
                }
                _ => {
                    return Err(Error::Structure(format!(
                        "term {:?} did not encrypt to its symmetric form",
                        logical.labels()
                    )))
                }
            }
        }
        Ok(PauliCipher { gamma, columns, terms })
    }

    /// Rebuilds a ciphertext from its column set and coefficients.
    pub fn from_parts(gamma: Gamma, columns: Vec<usize>, terms: BTreeMap<u64, f64>) -> Result<Self> {
        let mut sorted = columns.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != gamma.n() || sorted != columns || columns.iter().any(|&y| y >= gamma.q()) {
            return Err(Error::Decode(format!("invalid code column set {columns:?}")));
        }
        let limit = if gamma.p() >= MAX_PACKED_ROWS {
            u64::MAX
        } else {
            (1u64 << (2 * gamma.p())) - 1
        };
        if let Some((&k, _)) = terms.iter().find(|(&k, _)| k > limit) {
            return Err(Error::Decode(format!("label vector {k:#x} exceeds {} rows", gamma.p())));
        }
        if terms.values().any(|c| !c.is_finite()) {
            return Err(Error::Decode("non-finite coefficient".into()));
        }
        Ok(PauliCipher { gamma, columns, terms })
    }

    pub fn gamma(&self) -> &Gamma {
        &self.gamma
    }

    /// The code column set `Y`, sorted.
    pub fn columns(&self) -> &[usize] {
        &self.columns
    }

    pub fn column_mask(&self) -> u64 {
        self.columns.iter().fold(0u64, |m, &y| m | (1 << y))
    }

    pub fn terms(&self) -> &BTreeMap<u64, f64> {
        &self.terms
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    fn relabel<F>(&mut self, f: F) -> Result<()>
    where
        F: Fn(u64) -> Result<(u64, f64)>,
    {
        let mut next = BTreeMap::new();
        for (&k, &c) in &self.terms {
            let (k2, sign) = f(k)?;
            if next.insert(k2, c * sign).is_some() {
                return Err(Error::Structure("transversal map is not injective".into()));
            }
        }
        self.terms = next;
        Ok(())
    }

    /// `G^{⊗q}` on one row: each code column contributes the same phase.
    pub fn apply_transversal_clifford(&mut self, gate: CliffordGate, row: usize) -> Result<()> {
        if row >= self.gamma.p() {
            return Err(Error::IndexOutOfRange(format!("row {row} of {}", self.gamma.p())));
        }
        let n = self.gamma.n();
        self.relabel(|k| {
            let (l, phase) = conjugate_transversal_row(gate, packed_get(k, row), n)?;
            Ok((packed_set(k, row, l), real_sign(phase, "a transversal Clifford")?))
        })
    }

    /// Column-wise CNOT between two rows.
    pub fn apply_transversal_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        let p = self.gamma.p();
        if control >= p || target >= p {
            return Err(Error::IndexOutOfRange(format!("rows ({control}, {target}) of {p}")));
        }
        if control == target {
            return Err(Error::IndexOutOfRange("transversal CNOT rows coincide".into()));
        }
        let n = self.gamma.n() as u64;
        self.relabel(|k| {
            let (lc, lt, phase) = conjugate_cnot(packed_get(k, control), packed_get(k, target));
            let k2 = packed_set(packed_set(k, control, lc), target, lt);
            Ok((k2, real_sign(phase.pow(n), "a transversal CNOT")?))
        })
    }

    pub fn apply_schedule(&mut self, schedule: &[RowOp]) -> Result<()> {
        for op in schedule {
            match *op {
                RowOp::Clifford { gate, row } => self.apply_transversal_clifford(gate, row)?,
                RowOp::Cnot { control, target } => self.apply_transversal_cnot(control, target)?,
            }
        }
        Ok(())
    }

    /// Reduced state on grid positions. Only terms supported inside the
    /// kept positions survive the partial trace.
    pub fn reduced_state(&self, positions: &[GridIndex]) -> Result<DensityMatrix> {
        let (p, q) = (self.gamma.p(), self.gamma.q());
        for at in positions {
            if at.row >= p || at.col >= q {
                return Err(Error::IndexOutOfRange(format!("({}, {}) on a {p}x{q} grid", at.row, at.col)));
            }
        }
        let mut kept = Vec::new();
        'terms: for (&k, &c) in &self.terms {
            let mut local = 0u64;
            for x in 0..p {
                let l = packed_get(k, x);
                if l == PauliLabel::I {
                    continue;
                }
                for &y in &self.columns {
                    match positions.iter().position(|at| at.row == x && at.col == y) {
                        Some(j) => local = packed_set(local, j, l),
                        None => continue 'terms,
                    }
                }
            }
            kept.push((local, c));
        }
        DensityMatrix::from_pauli_terms(positions.len(), kept)
    }

    /// Unpermutes with `κ`, applies `U†` and keeps the terms that act on
    /// column 0 alone; every other term traces out to zero.
    pub fn decode(&self, key: &SecretKey) -> Result<(LogicalState, DecodeCost)> {
        key.check_gamma(&self.gamma)?;
        let ladder = decoding_cnots(self.gamma.n(), LadderOrder::Ascending)?;
        let inverse = key.permutation().inverse();
        let mut logical = BTreeMap::new();
        for (&k, &c) in &self.terms {
            let v = LogicalPauliVector::unpack(k, self.gamma.p());
            let g = GridPauli::from_column_vector(&v, self.gamma.q(), &self.columns);
            let mut g = g.permute_columns(&inverse)?;
            conjugate_ladder(&mut g, &ladder)?;
            if let Some(w) = column_form(&g, &[0]) {
                let sign = real_sign(g.phase(), "decoding")?;
                logical.insert(w.pack(), c * sign);
            }
        }
        let cost = DecodeCost {
            u_dagger_cnots: self.gamma.p() * ladder.len(),
            permutation_swaps: self.gamma.p() * key.permutation().transposition_count(),
        };
        Ok((
            LogicalState::Pauli {
                rows: self.gamma.p(),
                terms: logical,
            },
            cost,
        ))
    }
}
