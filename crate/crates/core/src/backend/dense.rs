//! Exact dense oracle over the full `p × q` grid.
//!
//! The maximally mixed ancillas are an explicit mixture over computational
//! basis assignments. A ciphertext keeps the branch source and a log of grid
//! operations; each branch is rebuilt and replayed when it is read, so memory
//! holds one state vector at a time.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::logical::LogicalState;
use super::DecodeCost;
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::gates::Matrix2;
use crate::params::Gamma;
use crate::permutation::ColumnPermutation;
use crate::pauli::GridIndex;
use crate::scheme::encoding::{decoding_cnots, encoding_cnots, LadderOrder};
use crate::scheme::input::InputBlock;
use crate::scheme::key::SecretKey;
use crate::scheme::schedule::RowOp;

/// Enumeration is refused beyond this many mixed qubits.
pub const MAX_ENUMERATED_ANCILLAS: usize = 20;
/// Largest grid the oracle will hold as a state vector.
pub const MAX_GRID_QUBITS: usize = 24;
/// Largest reduced state built from branch vectors.
pub const MAX_REDUCED_QUBITS: usize = 12;

/// How the mixed qubits appended by encryption are represented.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MixturePolicy {
    /// Every basis assignment, uniformly weighted.
    Enumerate,
    /// `samples` assignments drawn uniformly with a seeded generator.
    Sample { samples: usize, seed: u64 },
}

/// A unitary on grid qubits, addressed by amplitude bit.
#[derive(Clone, Debug, PartialEq)]
pub enum GridOp {
    Gate1 { matrix: Matrix2, bit: usize },
    Cnot { control: usize, target: usize },
    Permute(ColumnPermutation),
}

#[derive(Debug, PartialEq)]
enum BranchSource {
    /// Pure components of `τ` on column 0 with ancilla assignments.
    Mixture {
        components: Vec<(f64, Vec<Complex64>)>,
        /// `None` means all `2^{p(q-1)}` assignments.
        assignments: Option<Vec<u64>>,
    },
    /// Full grid vectors, as read back from a serialized ciphertext.
    Explicit(Vec<(f64, Vec<Complex64>)>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseCipher {
    gamma: Gamma,
    source: Arc<BranchSource>,
    ops: Vec<GridOp>,
}

fn spread(bits: u64, positions: &[usize]) -> usize {
    positions
        .iter()
        .enumerate()
        .fold(0usize, |acc, (j, &pos)| acc | ((((bits >> j) & 1) as usize) << pos))
}

fn gather(index: usize, positions: &[usize]) -> usize {
    positions
        .iter()
        .enumerate()
        .fold(0usize, |acc, (j, &pos)| acc | (((index >> pos) & 1) << j))
}

fn grid_guard(gamma: &Gamma) -> Result<()> {
    let pq = gamma.p() * gamma.q();
    if pq > MAX_GRID_QUBITS {
        return Err(Error::GuardExceeded {
            what: "dense grid qubit count p*q",
            value: pq,
            limit: MAX_GRID_QUBITS,
        });
    }
    Ok(())
}

fn apply_op(v: &mut [Complex64], op: &GridOp, p: usize, q: usize, scratch: &mut Vec<Complex64>) {
    match op {
        GridOp::Gate1 { matrix: u, bit } => {
            let b = 1usize << bit;
            for base in (0..v.len()).step_by(2 * b) {
                for i in base..base + b {
                    let (x, y) = (v[i], v[i | b]);
                    v[i] = u[0][0] * x + u[0][1] * y;
                    v[i | b] = u[1][0] * x + u[1][1] * y;
                }
            }
        }
        GridOp::Cnot { control, target } => {
            let (c, t) = (1usize << control, 1usize << target);
            for base in (0..v.len()).step_by(2 * t) {
                for i in base..base + t {
                    if i & c != 0 {
                        v.swap(i, i | t);
                    }
                }
            }
        }
        GridOp::Permute(perm) => {
            // byte-wise lookup of the destination index
            let bits = p * q;
            let chunks = bits.div_ceil(8);
            let mut table = vec![[0usize; 256]; chunks];
            for (k, t) in table.iter_mut().enumerate() {
                for (byte, slot) in t.iter_mut().enumerate() {
                    for j in 0..8 {
                        let b = 8 * k + j;
                        if b < bits && byte & (1 << j) != 0 {
                            *slot |= 1 << ((b / q) * q + perm.apply(b % q));
                        }
                    }
                }
            }
            scratch.clear();
            scratch.resize(v.len(), Complex64::new(0.0, 0.0));
            for (i, &amp) in v.iter().enumerate() {
                let j = table.iter().enumerate().fold(0usize, |acc, (k, t)| acc | t[(i >> (8 * k)) & 0xff]);
                scratch[j] = amp;
            }
            v.copy_from_slice(scratch);
        }
    }
}

/// Adds `weight · tr_rest |v⟩⟨v|` on `keep` into `acc`.
fn accumulate_reduced(acc: &mut DMatrix<Complex64>, v: &[Complex64], keep: &[usize], weight: f64) {
    let mask = keep.iter().fold(0usize, |m, &b| m | (1 << b));
    let offsets: Vec<usize> = (0..1u64 << keep.len()).map(|b| spread(b, keep)).collect();
    for (i, &amp) in v.iter().enumerate() {
        if amp.re == 0.0 && amp.im == 0.0 {
            continue;
        }
        let a = gather(i, keep);
        let rest = i & !mask;
        let wa = amp * weight;
        for (b, &off) in offsets.iter().enumerate() {
            acc[(a, b)] += wa * v[rest | off].conj();
        }
    }
}

impl DenseCipher {
    /// `P_κ U (τ ⊗ I/2^{p(q-1)}) U† P_κ†` as a mixture of branches.
    pub fn encrypt(key: &SecretKey, block: &InputBlock, policy: MixturePolicy) -> Result<Self> {
        let gamma = *block.gamma();
        key.check_gamma(&gamma)?;
        grid_guard(&gamma)?;
        let mixed = gamma.p() * (gamma.q() - 1);
        let assignments = match policy {
            MixturePolicy::Enumerate => {
                if mixed > MAX_ENUMERATED_ANCILLAS {
                    return Err(Error::GuardExceeded {
                        what: "enumerated mixed qubits p*(q-1)",
                        value: mixed,
                        limit: MAX_ENUMERATED_ANCILLAS,
                    });
                }
                None
            }
            MixturePolicy::Sample { samples, seed } => {
                if samples == 0 {
                    return Err(Error::InvalidParams("sample count must be positive".into()));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mask = (1u64 << mixed) - 1;
                Some((0..samples).map(|_| rng.gen::<u64>() & mask).collect())
            }
        };
        let source = BranchSource::Mixture {
            components: block.pure_components(),
            assignments,
        };
        let mut ops = encoding_ops(&gamma, false)?;
        ops.push(GridOp::Permute(key.permutation().clone()));
        Ok(DenseCipher {
            gamma,
            source: Arc::new(source),
            ops,
        })
    }

    /// Rebuilds a ciphertext from explicit weighted grid vectors.
    pub fn from_branches(gamma: Gamma, branches: Vec<(f64, Vec<Complex64>)>) -> Result<Self> {
        grid_guard(&gamma)?;
        let dim = 1usize << (gamma.p() * gamma.q());
        for (w, v) in &branches {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            let norm: f64 = v.iter().map(|a| a.norm_sqr()).sum();
            if (norm - 1.0).abs() > 1e-9 || !w.is_finite() || *w < 0.0 {
                return Err(Error::Decode(format!("branch with weight {w} has squared norm {norm}")));
            }
        }
        Ok(DenseCipher {
            gamma,
            source: Arc::new(BranchSource::Explicit(branches)),
            ops: Vec::new(),
        })
    }

    pub fn gamma(&self) -> &Gamma {
        &self.gamma
    }

    pub fn branch_count(&self) -> usize {
        match &*self.source {
            BranchSource::Mixture {
                components,
                assignments,
            } => {
                let per = match assignments {
                    Some(a) => a.len(),
                    None => 1usize << (self.gamma.p() * (self.gamma.q() - 1)),
                };
                components.len() * per
            }
            BranchSource::Explicit(b) => b.len(),
        }
    }

    pub fn op_count(&self) -> usize {
        self.ops.len()
    }

    /// Appends the grid operations of a transversal schedule.
    pub fn apply_schedule(&mut self, schedule: &[RowOp]) {
        let q = self.gamma.q();
        let bit = |row: usize, col: usize| GridIndex::new(row, col).bit(q);
        for op in schedule {
            for y in 0..q {
                self.ops.push(match *op {
                    RowOp::Clifford { gate, row } => GridOp::Gate1 {
                        matrix: gate.matrix(),
                        bit: bit(row, y),
                    },
                    RowOp::Cnot { control, target } => GridOp::Cnot {
                        control: bit(control, y),
                        target: bit(target, y),
                    },
                });
            }
        }
    }

    /// Appends a single grid operation.
    pub fn push_op(&mut self, op: GridOp) -> Result<()> {
        let n = self.gamma.p() * self.gamma.q();
        let ok = match &op {
            GridOp::Gate1 { bit, .. } => *bit < n,
            GridOp::Cnot { control, target } => *control < n && *target < n && control != target,
            GridOp::Permute(perm) => perm.len() == self.gamma.q(),
        };
        if !ok {
            return Err(Error::IndexOutOfRange(format!("{op:?} on {n} grid qubits")));
        }
        self.ops.push(op);
        Ok(())
    }

    /// Calls `f(weight, vector)` for every branch after `self.ops` and `extra`.
    pub fn for_each_branch<F>(&self, extra: &[GridOp], mut f: F) -> Result<()>
    where
        F: FnMut(f64, &[Complex64]) -> Result<()>,
    {
        let (p, q) = (self.gamma.p(), self.gamma.q());
        let dim = 1usize << (p * q);
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        let mut scratch = Vec::new();
        let mut run = |v: &mut Vec<Complex64>, weight: f64| -> Result<()> {
            for op in self.ops.iter().chain(extra) {
                apply_op(v, op, p, q, &mut scratch);
            }
            f(weight, v)
        };
        match &*self.source {
            BranchSource::Mixture {
                components,
                assignments,
            } => {
                let column0: Vec<usize> = (0..p).map(|x| x * q).collect();
                let mixed: Vec<usize> = (0..p).flat_map(|x| (1..q).map(move |y| x * q + y)).collect();
                let all;
                let (list, per): (&[u64], f64) = match assignments {
                    Some(a) => (a, a.len() as f64),
                    None => {
                        all = (0..1u64 << mixed.len()).collect::<Vec<_>>();
                        (&all, all.len() as f64)
                    }
                };
                for (lambda, amps) in components {
                    for &assign in list {
                        v.fill(Complex64::new(0.0, 0.0));
                        let base = spread(assign, &mixed);
                        for (i, &a) in amps.iter().enumerate() {
                            v[base | spread(i as u64, &column0)] = a;
                        }
                        run(&mut v, lambda / per)?;
                    }
                }
            }
            BranchSource::Explicit(branches) => {
                for (w, amps) in branches {
                    v.copy_from_slice(amps);
                    run(&mut v, *w)?;
                }
            }
        }
        Ok(())
    }

    /// All branches with the operation log applied.
    pub fn materialize(&self) -> Result<Vec<(f64, Vec<Complex64>)>> {
        let mut out = Vec::with_capacity(self.branch_count());
        self.for_each_branch(&[], |w, v| {
            out.push((w, v.to_vec()));
            Ok(())
        })?;
        Ok(out)
    }

    /// Reduced state on grid positions; qubit `j` of the result is `positions[j]`.
    pub fn reduced_state(&self, positions: &[GridIndex]) -> Result<DensityMatrix> {
        Ok(self.reduced_after(&[], &[positions.to_vec()])?.remove(0))
    }

    /// Several reduced states from a single replay of the branches.
    pub fn reduced_states(&self, sets: &[Vec<GridIndex>]) -> Result<Vec<DensityMatrix>> {
        self.reduced_after(&[], sets)
    }

    fn reduced_after(&self, extra: &[GridOp], sets: &[Vec<GridIndex>]) -> Result<Vec<DensityMatrix>> {
        let (p, q) = (self.gamma.p(), self.gamma.q());
        let mut keeps = Vec::with_capacity(sets.len());
        for positions in sets {
            if positions.len() > MAX_REDUCED_QUBITS {
                return Err(Error::GuardExceeded {
                    what: "reduced state qubit count",
                    value: positions.len(),
                    limit: MAX_REDUCED_QUBITS,
                });
            }
            let mut keep = Vec::with_capacity(positions.len());
            for at in positions {
                if at.row >= p || at.col >= q {
                    return Err(Error::IndexOutOfRange(format!("({}, {}) on a {p}x{q} grid", at.row, at.col)));
                }
                let b = at.bit(q);
                if keep.contains(&b) {
                    return Err(Error::IndexOutOfRange(format!("repeated position ({}, {})", at.row, at.col)));
                }
                keep.push(b);
            }
            keeps.push(keep);
        }
        let mut accs: Vec<DMatrix<Complex64>> = keeps
            .iter()
            .map(|k| DMatrix::zeros(1 << k.len(), 1 << k.len()))
            .collect();
        self.for_each_branch(extra, |w, v| {
            for (acc, keep) in accs.iter_mut().zip(&keeps) {
                accumulate_reduced(acc, v, keep, w);
            }
            Ok(())
        })?;
        accs.into_iter().map(DensityMatrix::from_matrix).collect()
    }

    /// Unpermutes with `κ`, applies `U†` and returns the column-0 state.
    pub fn decode(&self, key: &SecretKey) -> Result<(LogicalState, DecodeCost)> {
        key.check_gamma(&self.gamma)?;
        let mut tail = vec![GridOp::Permute(key.permutation().inverse())];
        tail.extend(encoding_ops(&self.gamma, true)?);
        let cost = DecodeCost {
            u_dagger_cnots: tail.len() - 1,
            permutation_swaps: self.gamma.p() * key.permutation().transposition_count(),
        };
        let column0: Vec<GridIndex> = (0..self.gamma.p()).map(|x| GridIndex::new(x, 0)).collect();
        let rho = self.reduced_after(&tail, &[column0])?.remove(0);
        Ok((LogicalState::Dense(rho), cost))
    }
}

/// `U` (or `U†` when `inverse`) as grid CNOTs, row by row.
fn encoding_ops(gamma: &Gamma, inverse: bool) -> Result<Vec<GridOp>> {
    let q = gamma.q();
    let ladder = if inverse {
        decoding_cnots(gamma.n(), LadderOrder::Ascending)?
    } else {
        encoding_cnots(gamma.n(), LadderOrder::Ascending)?
    };
    let mut ops = Vec::with_capacity(gamma.p() * ladder.len());
    for x in 0..gamma.p() {
        for &(c, t) in &ladder {
            ops.push(GridOp::Cnot {
                control: GridIndex::new(x, c).bit(q),
                target: GridIndex::new(x, t).bit(q),
            });
        }
    }
    Ok(ops)
}
