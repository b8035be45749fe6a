//! Dense checks that the encoding ladder turns transversal gates into logical ones.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gates::{self, CliffordGate, Matrix2};
use crate::pauli::PauliLabel;
use crate::scheme::encoding::{encoding_cnots, LadderOrder};

type Op = DMatrix<Complex64>;

/// Largest code length checked densely (two rows of `n` qubits).
pub const MAX_IDENTITY_N: usize = 5;

/// Largest entrywise deviation of each identity.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub n: usize,
    /// `U† X_0 U` against `X^{⊗n}`.
    pub x: f64,
    /// `U† Z_0 U` against `Z^{⊗n}`.
    pub z: f64,
    /// `U† Y_0 U` against `i^{1-n} Y^{⊗n}`.
    pub y: f64,
    /// Transversal H and S against their single-qubit action on X, Y, Z.
    pub single_qubit_table: f64,
    /// Transversal CNOT between two rows against a bare CNOT.
    pub cnot: f64,
    /// The three ladder orders against each other.
    pub ladder_orders: f64,
}

impl IdentityReport {
    pub fn max_error(&self) -> f64 {
        [self.x, self.z, self.y, self.single_qubit_table, self.cnot, self.ladder_orders]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

fn dense(m: &Matrix2) -> Op {
    DMatrix::from_fn(2, 2, |i, j| m[i][j])
}

fn tensor(k: usize, factors: &[(usize, Matrix2)]) -> Op {
    let mut out = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
    for qubit in (0..k).rev() {
        let m = factors
            .iter()
            .find(|(j, _)| *j == qubit)
            .map_or_else(|| dense(&gates::identity()), |(_, m)| dense(m));
        out = out.kronecker(&m);
    }
    out
}

fn on_all(k: usize, m: Matrix2) -> Op {
    tensor(k, &(0..k).map(|j| (j, m)).collect::<Vec<_>>())
}

fn basis_map(k: usize, pairs: &[(usize, usize)]) -> Vec<usize> {
    (0..1usize << k)
        .map(|i| pairs.iter().fold(i, |i, &(c, t)| i ^ (((i >> c) & 1) << t)))
        .collect()
}

/// `C M C†` for a CNOT sequence `C`.
fn conjugate(k: usize, pairs: &[(usize, usize)], m: &Op) -> Op {
    let pi = basis_map(k, pairs);
    let mut out = DMatrix::zeros(m.nrows(), m.ncols());
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            out[(pi[i], pi[j])] = m[(i, j)];
        }
    }
    out
}

fn reversed(pairs: &[(usize, usize)]) -> Vec<(usize, usize)> {
    pairs.iter().rev().copied().collect()
}

fn deviation(a: &Op, b: &Op) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn check_logical_identities(n: usize) -> Result<IdentityReport> {
    if n > MAX_IDENTITY_N {
        return Err(Error::GuardExceeded {
            what: "identity check code length",
            value: n,
            limit: MAX_IDENTITY_N,
        });
    }
    let enc = encoding_cnots(n, LadderOrder::Ascending)?;
    let dec = reversed(&enc);
    let spread = |m: Matrix2| conjugate(n, &dec, &tensor(n, &[(0, m)]));

    let i_pow = Complex64::new(0.0, 1.0).powi(1 - n as i32);
    let y_err = deviation(&spread(gates::pauli_y()), &on_all(n, gates::pauli_y()).map(|v| v * i_pow));

    let mut table = 0.0f64;
    for g in [CliffordGate::H, CliffordGate::S] {
        let gm = dense(&g.matrix());
        let transversal = on_all(n, g.matrix());
        for p in [PauliLabel::X, PauliLabel::Y, PauliLabel::Z] {
            let expected = &gm * dense(&p.matrix()) * gm.adjoint();
            let logical = conjugate(n, &enc, &tensor(n, &[(0, p.matrix())]));
            let moved = &transversal * logical * transversal.adjoint();
            let decoded = conjugate(n, &dec, &moved);
            table = table.max(deviation(&decoded, &tensor_first(n, &expected)));
        }
    }

    let k = 2 * n;
    let mut both = Vec::new();
    for row in 0..2 {
        both.extend(enc.iter().map(|&(c, t)| (row * n + c, row * n + t)));
    }
    let both_dec = reversed(&both);
    let transversal: Vec<_> = (0..n).map(|y| (y, n + y)).collect();
    let bare = [(0, n)];
    let mut cnot = 0.0f64;
    for (q, m) in [(0, gates::pauli_x()), (0, gates::pauli_z()), (n, gates::pauli_x()), (n, gates::pauli_z())] {
        let p = tensor(k, &[(q, m)]);
        let expected = conjugate(k, &bare, &p);
        let decoded = conjugate(k, &both_dec, &conjugate(k, &transversal, &conjugate(k, &both, &p)));
        cnot = cnot.max(deviation(&decoded, &expected));
    }

    let reference = basis_map(n, &enc);
    let mut orders = 0.0f64;
    for order in [LadderOrder::DescendingControls, LadderOrder::Descending] {
        if basis_map(n, &encoding_cnots(n, order)?) != reference {
            orders = 1.0;
        }
    }

    Ok(IdentityReport {
        n,
        x: deviation(&spread(gates::pauli_x()), &on_all(n, gates::pauli_x())),
        z: deviation(&spread(gates::pauli_z()), &on_all(n, gates::pauli_z())),
        y: y_err,
        single_qubit_table: table,
        cnot,
        ladder_orders: orders,
    })
}

/// `m` on qubit 0 and the identity on the other `n - 1`.
fn tensor_first(n: usize, m: &Op) -> Op {
    DMatrix::<Complex64>::identity(1 << (n - 1), 1 << (n - 1)).kronecker(m)
}
