use nalgebra::DMatrix;
use num_complex::Complex64;
use qhe_core::gates::{self, CliffordGate, Matrix2};
use qhe_core::scheme::encoding::{encoding_cnots, LadderOrder};

type Op = DMatrix<Complex64>;

const N: usize = 5;
const TOL: f64 = 1e-12;

fn to_dense(m: &Matrix2) -> Op {
    DMatrix::from_fn(2, 2, |i, j| m[i][j])
}

/// Tensor product with `factors[j]` on qubit `j` (bit `j` of the index).
fn tensor(k: usize, factors: &[(usize, Matrix2)]) -> Op {
    let mut out = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
    for qubit in (0..k).rev() {
        let m = factors
            .iter()
            .find(|(j, _)| *j == qubit)
            .map(|(_, m)| to_dense(m))
            .unwrap_or_else(|| to_dense(&gates::identity()));
        out = out.kronecker(&m);
    }
    out
}

fn uniform(k: usize, qubits: impl IntoIterator<Item = usize>, m: Matrix2) -> Op {
    let factors: Vec<_> = qubits.into_iter().map(|j| (j, m)).collect();
    tensor(k, &factors)
}

/// Basis map of a CNOT sequence, as `i ↦ π(i)`.
fn basis_map(k: usize, pairs: &[(usize, usize)]) -> Vec<usize> {
    (0..1usize << k)
        .map(|i| pairs.iter().fold(i, |i, &(c, t)| i ^ (((i >> c) & 1) << t)))
        .collect()
}

fn circuit(k: usize, pairs: &[(usize, usize)]) -> Op {
    let dim = 1 << k;
    let mut out = DMatrix::zeros(dim, dim);
    for (i, &j) in basis_map(k, pairs).iter().enumerate() {
        out[(j, i)] = Complex64::new(1.0, 0.0);
    }
    out
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

fn encoder(order: LadderOrder) -> Op {
    circuit(N, &encoding_cnots(N, order).unwrap())
}

fn close(a: &Op, b: &Op) -> bool {
    (a - b).iter().all(|z| z.norm() < TOL)
}

fn scaled(m: &Op, s: Complex64) -> Op {
    m.map(|z| z * s)
}

#[test]
fn ladder_orders_agree() {
    let u = encoder(LadderOrder::Ascending);
    assert!(close(&u, &encoder(LadderOrder::DescendingControls)));
    assert!(close(&u, &encoder(LadderOrder::Descending)));
}

#[test]
fn column_zero_paulis_spread_to_all_columns() {
    let u = encoder(LadderOrder::Ascending);
    let ud = u.adjoint();
    for m in [gates::pauli_x(), gates::pauli_z()] {
        let lhs = &ud * tensor(N, &[(0, m)]) * &u;
        assert!(close(&lhs, &uniform(N, 0..N, m)));
    }
    // Y = iXZ picks up i·(-i)^n = i^{1-n}, which is 1 for n = 5.
    let lhs = &ud * tensor(N, &[(0, gates::pauli_y())]) * &u;
    assert!(close(&lhs, &uniform(N, 0..N, gates::pauli_y())));
}

#[test]
fn transversal_single_qubit_cliffords_act_logically() {
    let u = encoder(LadderOrder::Ascending);
    let ud = u.adjoint();
    let paulis = [gates::pauli_x(), gates::pauli_y(), gates::pauli_z()];
    for g in [CliffordGate::H, CliffordGate::S] {
        let transversal = uniform(N, 0..N, g.matrix());
        let gm = to_dense(&g.matrix());
        for p in paulis {
            // Physical target: G P G† on the bare qubit, as a phase times a Pauli.
            let image = &gm * to_dense(&p) * gm.adjoint();
            let (label, phase) = paulis
                .iter()
                .find_map(|q| {
                    let qd = to_dense(q);
                    [1.0, -1.0]
                        .into_iter()
                        .map(|s| Complex64::new(s, 0.0))
                        .find(|&s| close(&image, &scaled(&qd, s)))
                        .map(|s| (*q, s))
                })
                .unwrap();
            let logical = &u * tensor(N, &[(0, p)]) * &ud;
            let conjugated = &transversal * logical * transversal.adjoint();
            let decoded = &ud * conjugated * &u;
            assert!(close(&decoded, &scaled(&tensor(N, &[(0, label)]), phase)), "{g:?}");
        }
    }
}

#[test]
fn transversal_cnot_is_logical_cnot() {
    let k = 2 * N;
    let row = |x: usize, y: usize| x * N + y;
    let mut enc = Vec::new();
    for x in 0..2 {
        enc.extend(encoding_cnots(N, LadderOrder::Ascending).unwrap().into_iter().map(|(c, t)| (row(x, c), row(x, t))));
    }
    let dec = reversed(&enc);
    let transversal: Vec<_> = (0..N).map(|y| (row(0, y), row(1, y))).collect();
    let bare = [(row(0, 0), row(1, 0))];
    for (q, m) in [
        (row(0, 0), gates::pauli_x()),
        (row(0, 0), gates::pauli_z()),
        (row(1, 0), gates::pauli_x()),
        (row(1, 0), gates::pauli_z()),
    ] {
        let p = tensor(k, &[(q, m)]);
        let expected = conjugate(k, &bare, &p);
        let decoded = conjugate(k, &dec, &conjugate(k, &transversal, &conjugate(k, &enc, &p)));
        assert!(close(&decoded, &expected));
    }
}

#[test]
fn library_checker_agrees() {
    let report = qhe_core::scheme::identities::check_logical_identities(N).unwrap();
    assert!(report.max_error() < TOL, "{report:?}");
    assert!(qhe_core::scheme::identities::check_logical_identities(9).is_err());
}
