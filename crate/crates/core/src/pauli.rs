//! Pauli label algebra on a `p × q` qubit grid.
//!
//! Labels follow `σ_0 = I, σ_1 = X, σ_2 = Y, σ_3 = Z`. Phases live in the exact
//! group `{1, i, -1, -i}`. The conjugation and multiplication tables are
//! generated once from the 2×2 / 4×4 matrices in [`crate::gates`] and then
//! frozen, so they cannot drift from the matrices they describe.
//!
//! Grid positions are 0-based here: `(row, col)` with `row < p`, `col < q`.
//! Row `x` of copy `β` (both 0-based) is global row `β (r + t) + x`.

use std::fmt;
use std::ops::Mul;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{self, CliffordGate, Matrix2};
use crate::permutation::ColumnPermutation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(u8)]
pub enum PauliLabel {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

impl PauliLabel {
    pub const ALL: [PauliLabel; 4] = [PauliLabel::I, PauliLabel::X, PauliLabel::Y, PauliLabel::Z];

    pub fn from_index(value: u8) -> Option<Self> {
        match value {
            0 => Some(PauliLabel::I),
            1 => Some(PauliLabel::X),
            2 => Some(PauliLabel::Y),
            3 => Some(PauliLabel::Z),
            _ => None,
        }
    }

    #[inline]
    pub fn index(self) -> u8 {
        self as u8
    }

    pub fn matrix(self) -> Matrix2 {
        match self {
            PauliLabel::I => gates::identity(),
            PauliLabel::X => gates::pauli_x(),
            PauliLabel::Y => gates::pauli_y(),
            PauliLabel::Z => gates::pauli_z(),
        }
    }

    /// Whether the label flips the computational basis (X or Y).
    #[inline]
    pub fn has_x(self) -> bool {
        matches!(self, PauliLabel::X | PauliLabel::Y)
    }

    /// Whether the label carries a Z component (Z or Y).
    #[inline]
    pub fn has_z(self) -> bool {
        matches!(self, PauliLabel::Z | PauliLabel::Y)
    }

    pub fn commutes_with(self, other: PauliLabel) -> bool {
        self == PauliLabel::I || other == PauliLabel::I || self == other
    }
}

impl fmt::Display for PauliLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            PauliLabel::I => "I",
            PauliLabel::X => "X",
            PauliLabel::Y => "Y",
            PauliLabel::Z => "Z",
        };
        f.write_str(c)
    }
}

/// An element of `{1, i, -1, -i}`, stored as the exponent of `i` mod 4.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(e: u32) -> Self {
        Phase((e % 4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn pow(self, n: u64) -> Self {
        Phase(((self.0 as u64 * (n % 4)) % 4) as u8)
    }

    pub fn inverse(self) -> Self {
        Phase((4 - self.0) % 4)
    }

    pub fn is_real(self) -> bool {
        self.0 % 2 == 0
    }

    /// `+1.0` or `-1.0` for a real phase, `None` otherwise.
    pub fn sign(self) -> Option<f64> {
        match self.0 {
            0 => Some(1.0),
            2 => Some(-1.0),
            _ => None,
        }
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    fn from_complex(c: Complex64) -> Option<Self> {
        (0..4u8)
            .map(Phase)
            .find(|p| (p.to_complex() - c).norm() < 1e-9)
    }
}

impl Mul for Phase {
    type Output = Phase;

    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["+1", "+i", "-1", "-i"][self.0 as usize])
    }
}

struct Tables {
    single: [[(PauliLabel, Phase); 4]; 5],
    cnot: [[(PauliLabel, PauliLabel, Phase); 4]; 4],
    product: [[(PauliLabel, Phase); 4]; 4],
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(build_tables)
}

/// Writes `m = φ σ_l` for a 2×2 matrix known to be a phased Pauli.
fn decompose_2x2(m: &Matrix2) -> (PauliLabel, Phase) {
    for label in PauliLabel::ALL {
        let s = label.matrix();
        // tr(σ m) / 2
        let coeff = (s[0][0] * m[0][0] + s[0][1] * m[1][0] + s[1][0] * m[0][1] + s[1][1] * m[1][1]) * 0.5;
        if coeff.norm() > 0.5 {
            let phase = Phase::from_complex(coeff).expect("Clifford image is a phased Pauli");
            return (label, phase);
        }
    }
    unreachable!("matrix is not a phased Pauli")
}

type Matrix4 = [[Complex64; 4]; 4];

/// Two-qubit Kronecker product with `a` on the high index bit.
fn kron2(a: &Matrix2, b: &Matrix2) -> Matrix4 {
    let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[i >> 1][j >> 1] * b[i & 1][j & 1];
        }
    }
    out
}

fn mul4(a: &Matrix4, b: &Matrix4) -> Matrix4 {
    let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

fn decompose_4x4(m: &Matrix4) -> (PauliLabel, PauliLabel, Phase) {
    for a in PauliLabel::ALL {
        for b in PauliLabel::ALL {
            let s = kron2(&a.matrix(), &b.matrix());
            let mut coeff = Complex64::new(0.0, 0.0);
            for i in 0..4 {
                for j in 0..4 {
                    coeff += s[i][j] * m[j][i];
                }
            }
            coeff *= 0.25;
            if coeff.norm() > 0.5 {
                let phase = Phase::from_complex(coeff).expect("CNOT image is a phased Pauli");
                return (a, b, phase);
            }
        }
    }
    unreachable!("matrix is not a phased two-qubit Pauli")
}

fn cnot_matrix() -> Matrix4 {
    let one = Complex64::new(1.0, 0.0);
    let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
    // control on the high bit
    m[0][0] = one;
    m[1][1] = one;
    m[2][3] = one;
    m[3][2] = one;
    m
}

fn build_tables() -> Tables {
    let mut single = [[(PauliLabel::I, Phase::ONE); 4]; 5];
    for (gi, g) in CliffordGate::ALL.iter().enumerate() {
        let gm = g.matrix();
        for p in PauliLabel::ALL {
            let conj = gates::mul(&gates::mul(&gm, &p.matrix()), &gates::dagger(&gm));
            single[gi][p.index() as usize] = decompose_2x2(&conj);
        }
    }

    let c = cnot_matrix();
    let mut cnot = [[(PauliLabel::I, PauliLabel::I, Phase::ONE); 4]; 4];
    for a in PauliLabel::ALL {
        for b in PauliLabel::ALL {
            let conj = mul4(&mul4(&c, &kron2(&a.matrix(), &b.matrix())), &c);
            cnot[a.index() as usize][b.index() as usize] = decompose_4x4(&conj);
        }
    }

    let mut product = [[(PauliLabel::I, Phase::ONE); 4]; 4];
    for a in PauliLabel::ALL {
        for b in PauliLabel::ALL {
            product[a.index() as usize][b.index() as usize] = decompose_2x2(&gates::mul(&a.matrix(), &b.matrix()));
        }
    }

    Tables { single, cnot, product }
}

fn gate_slot(g: CliffordGate) -> usize {
    CliffordGate::ALL.iter().position(|&x| x == g).unwrap()
}

/// `g σ g† = φ σ'`.
pub fn conjugate_single(g: CliffordGate, pl: PauliLabel) -> (PauliLabel, Phase) {
    tables().single[gate_slot(g)][pl.index() as usize]
}

/// Image of `σ_c ⊗ σ_t` under conjugation by CNOT(control, target).
pub fn conjugate_cnot(control: PauliLabel, target: PauliLabel) -> (PauliLabel, PauliLabel, Phase) {
    tables().cnot[control.index() as usize][target.index() as usize]
}

/// Conjugation of a row label by the transversal gate `g^{⊗n}`.
///
/// The phase is `φ^n`, which equals `φ` because `n ≡ 1 (mod 4)`.
pub fn conjugate_transversal_row(g: CliffordGate, pl: PauliLabel, n: usize) -> Result<(PauliLabel, Phase)> {
    check_code_length(n)?;
    let (label, phase) = conjugate_single(g, pl);
    Ok((label, phase.pow(n as u64)))
}

pub(crate) fn check_code_length(n: usize) -> Result<()> {
    if n >= 5 && n % 4 == 1 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("n must be 4n'+1 with n' >= 1, got n = {n}")))
    }
}

/// `σ_a σ_b = φ σ_c`.
pub fn pauli_multiply(a: PauliLabel, b: PauliLabel) -> (PauliLabel, Phase) {
    tables().product[a.index() as usize][b.index() as usize]
}

/// A grid position, 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridIndex {
    pub row: usize,
    pub col: usize,
}

impl GridIndex {
    pub fn new(row: usize, col: usize) -> Self {
        GridIndex { row, col }
    }

    /// Global row of local row `local` in copy `copy`, for blocks of `rows_per_copy` rows.
    pub fn row_of(copy: usize, local: usize, rows_per_copy: usize) -> usize {
        copy * rows_per_copy + local
    }

    /// Inverse of [`GridIndex::row_of`]: `(copy, local)`.
    pub fn split_row(row: usize, rows_per_copy: usize) -> (usize, usize) {
        (row / rows_per_copy, row % rows_per_copy)
    }

    /// Bit position of the qubit in a dense amplitude index (row-major, LSB first).
    #[inline]
    pub fn bit(self, q: usize) -> usize {
        self.row * q + self.col
    }
}

/// A column vector of `p` labels, one per grid row, packed two bits per row
/// (row `x` at bits `2x..2x+2`). Supports `p <= 32`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LogicalPauliVector {
    labels: Vec<PauliLabel>,
}

pub const MAX_PACKED_ROWS: usize = 32;

impl LogicalPauliVector {
    pub fn new(labels: Vec<PauliLabel>) -> Self {
        LogicalPauliVector { labels }
    }

    pub fn identity(p: usize) -> Self {
        LogicalPauliVector { labels: vec![PauliLabel::I; p] }
    }

    pub fn labels(&self) -> &[PauliLabel] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.labels.iter().all(|&l| l == PauliLabel::I)
    }

    pub fn pack(&self) -> u64 {
        assert!(self.labels.len() <= MAX_PACKED_ROWS);
        self.labels
            .iter()
            .enumerate()
            .fold(0u64, |acc, (x, l)| acc | ((l.index() as u64) << (2 * x)))
    }

    pub fn unpack(key: u64, p: usize) -> Self {
        LogicalPauliVector {
            labels: (0..p).map(|x| packed_get(key, x)).collect(),
        }
    }
}

#[inline]
pub fn packed_get(key: u64, row: usize) -> PauliLabel {
    PauliLabel::from_index(((key >> (2 * row)) & 3) as u8).unwrap()
}

#[inline]
pub fn packed_set(key: u64, row: usize, label: PauliLabel) -> u64 {
    (key & !(3u64 << (2 * row))) | ((label.index() as u64) << (2 * row))
}

/// A phased Pauli operator `φ σ_A` on a `p × q` grid, labels stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GridPauli {
    p: usize,
    q: usize,
    labels: Vec<PauliLabel>,
    phase: Phase,
}

impl GridPauli {
    pub fn identity(p: usize, q: usize) -> Self {
        GridPauli {
            p,
            q,
            labels: vec![PauliLabel::I; p * q],
            phase: Phase::ONE,
        }
    }

    pub fn from_labels(p: usize, q: usize, labels: Vec<PauliLabel>, phase: Phase) -> Result<Self> {
        if labels.len() != p * q {
            return Err(Error::DimensionMismatch {
                expected: p * q,
                found: labels.len(),
            });
        }
        Ok(GridPauli { p, q, labels, phase })
    }

    /// The operator carrying row label `v[x]` on every column in `columns`.
    pub fn from_column_vector(v: &LogicalPauliVector, q: usize, columns: &[usize]) -> Self {
        let p = v.len();
        let mut g = GridPauli::identity(p, q);
        for (x, &l) in v.labels().iter().enumerate() {
            for &y in columns {
                g.labels[x * q + y] = l;
            }
        }
        g
    }

    pub fn rows(&self) -> usize {
        self.p
    }

    pub fn cols(&self) -> usize {
        self.q
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn labels(&self) -> &[PauliLabel] {
        &self.labels
    }

    pub fn get(&self, at: GridIndex) -> PauliLabel {
        self.labels[at.row * self.q + at.col]
    }

    pub fn set(&mut self, at: GridIndex, label: PauliLabel) {
        self.labels[at.row * self.q + at.col] = label;
    }

    pub fn column(&self, col: usize) -> LogicalPauliVector {
        LogicalPauliVector::new((0..self.p).map(|x| self.labels[x * self.q + col]).collect())
    }

    /// Entry at `(x, y)` moves to `(x, π(y))`; the phase is unchanged.
    pub fn permute_columns(&self, perm: &ColumnPermutation) -> Result<GridPauli> {
        if perm.len() != self.q {
            return Err(Error::DimensionMismatch {
                expected: self.q,
                found: perm.len(),
            });
        }
        let mut labels = vec![PauliLabel::I; self.labels.len()];
        for x in 0..self.p {
            for y in 0..self.q {
                labels[x * self.q + perm.apply(y)] = self.labels[x * self.q + y];
            }
        }
        Ok(GridPauli {
            p: self.p,
            q: self.q,
            labels,
            phase: self.phase,
        })
    }

    fn check(&self, at: GridIndex) -> Result<()> {
        if at.row >= self.p || at.col >= self.q {
            return Err(Error::IndexOutOfRange(format!(
                "({}, {}) on a {}x{} grid",
                at.row, at.col, self.p, self.q
            )));
        }
        Ok(())
    }

    /// In-place `g σ g†` for a single-qubit Clifford on one grid qubit.
    pub fn conjugate_single(&mut self, g: CliffordGate, at: GridIndex) -> Result<()> {
        self.check(at)?;
        let (l, ph) = conjugate_single(g, self.get(at));
        self.set(at, l);
        self.phase = self.phase * ph;
        Ok(())
    }

    /// In-place conjugation by a CNOT between two grid qubits.
    pub fn conjugate_cnot(&mut self, control: GridIndex, target: GridIndex) -> Result<()> {
        self.check(control)?;
        self.check(target)?;
        if control == target {
            return Err(Error::IndexOutOfRange("CNOT endpoints coincide".into()));
        }
        let (lc, lt, ph) = conjugate_cnot(self.get(control), self.get(target));
        self.set(control, lc);
        self.set(target, lt);
        self.phase = self.phase * ph;
        Ok(())
    }

    pub fn is_identity(&self) -> bool {
        self.labels.iter().all(|&l| l == PauliLabel::I)
    }
}
