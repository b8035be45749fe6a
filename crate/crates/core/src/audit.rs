//! Exact permutation-averaged ciphertexts and the security bounds.
//!
//! Averaging `P ρ P†` over all `q!` column permutations sends each Pauli
//! term to the uniform average of its distinct column arrangements, so the
//! average is built from the arrangements of each encrypted term's multiset
//! of columns. A direct `q!`-term sum is kept as an independent check.

use std::collections::BTreeMap;
use std::f64::consts::{E, FRAC_1_SQRT_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::density::{pauli_basis_action, trace_norm_distance, DensityMatrix, MAX_DENSE_QUBITS};
use crate::error::{Error, Result};
use crate::params::Gamma;
use crate::pauli::{GridIndex, GridPauli, LogicalPauliVector, PauliLabel};
use crate::permutation::{next_permutation, ColumnPermutation};
use crate::scheme::encoding::{ladder, LadderOrder};
use crate::scheme::input::PlainState;

/// Largest grid for the direct `q!` average.
pub const MAX_DIRECT_QUBITS: usize = 10;
/// Largest `q` for the direct average.
pub const MAX_DIRECT_COLUMNS: usize = 7;

/// Grid shape of an audit: `p` rows, `n` code columns, `m` ancilla columns.
/// Unlike [`Gamma`], any `n ≥ 1` is allowed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AuditShape {
    pub p: usize,
    pub n: usize,
    pub m: usize,
}

impl AuditShape {
    pub fn new(p: usize, n: usize, m: usize) -> Result<Self> {
        if p == 0 || n == 0 {
            return Err(Error::InvalidParams("audit needs p >= 1 and n >= 1".into()));
        }
        let shape = AuditShape { p, n, m };
        if shape.grid_qubits() > MAX_DENSE_QUBITS {
            return Err(Error::GuardExceeded {
                what: "audit grid qubits p*q",
                value: shape.grid_qubits(),
                limit: MAX_DENSE_QUBITS,
            });
        }
        Ok(shape)
    }

    pub fn from_gamma(gamma: &Gamma) -> Result<Self> {
        AuditShape::new(gamma.p(), gamma.n(), gamma.m())
    }

    pub fn q(&self) -> usize {
        self.n + self.m
    }

    pub fn grid_qubits(&self) -> usize {
        self.p * self.q()
    }
}

fn check_input(tau: &DensityMatrix, shape: &AuditShape) -> Result<()> {
    if tau.num_qubits() != shape.p {
        return Err(Error::DimensionMismatch {
            expected: shape.p,
            found: tau.num_qubits(),
        });
    }
    Ok(())
}

/// Pauli terms of `U E(τ) U†` as (grid operator, real coefficient).
fn encrypted_terms(tau: &DensityMatrix, shape: &AuditShape) -> Result<Vec<(GridPauli, f64)>> {
    check_input(tau, shape)?;
    let cnots = ladder(shape.n, LadderOrder::Ascending);
    let mut out = Vec::new();
    for (key, c) in tau.pauli_coefficients().into_iter().enumerate() {
        if c.abs() <= 1e-15 {
            continue;
        }
        let v = LogicalPauliVector::unpack(key as u64, shape.p);
        let mut g = GridPauli::from_column_vector(&v, shape.q(), &[0]);
        for x in 0..shape.p {
            for &(ctl, tgt) in &cnots {
                g.conjugate_cnot(GridIndex::new(x, ctl), GridIndex::new(x, tgt))?;
            }
        }
        let sign = g
            .phase()
            .sign()
            .ok_or_else(|| Error::Structure("Hermitian term acquired an imaginary phase".into()))?;
        out.push((g, c * sign));
    }
    Ok(out)
}

fn pack_grid(labels: &[PauliLabel]) -> u64 {
    labels
        .iter()
        .enumerate()
        .fold(0u64, |k, (i, l)| k | ((l.index() as u64) << (2 * i)))
}

/// Pauli expansion of the averaged ciphertext, keyed by grid-packed labels
/// (qubit `x·q + y`), with `ρ = 2^{-pq} Σ w_k P_k`.
pub fn averaged_terms(tau: &DensityMatrix, shape: &AuditShape) -> Result<BTreeMap<u64, f64>> {
    let (p, q) = (shape.p, shape.q());
    let mut terms = BTreeMap::new();
    for (g, c) in encrypted_terms(tau, shape)? {
        let mut columns: Vec<u64> = (0..q).map(|y| g.column(y).pack()).collect();
        columns.sort_unstable();
        let mut arrangements = Vec::new();
        loop {
            arrangements.push(columns.clone());
            if !next_permutation(&mut columns) {
                break;
            }
        }
        let w = c / arrangements.len() as f64;
        for arr in arrangements {
            let mut labels = vec![PauliLabel::I; p * q];
            for (y, &col) in arr.iter().enumerate() {
                let v = LogicalPauliVector::unpack(col, p);
                for (x, &l) in v.labels().iter().enumerate() {
                    labels[x * q + y] = l;
                }
            }
            *terms.entry(pack_grid(&labels)).or_insert(0.0) += w;
        }
    }
    Ok(terms)
}

/// `(1/q!) Σ_P P U E(τ) U† P†` via distinct column arrangements.
pub fn averaged_ciphertext(tau: &DensityMatrix, shape: &AuditShape) -> Result<DensityMatrix> {
    DensityMatrix::from_pauli_terms(shape.grid_qubits(), averaged_terms(tau, shape)?)
}

/// The same average by summing over every permutation of a dense matrix.
pub fn averaged_ciphertext_direct(tau: &DensityMatrix, shape: &AuditShape) -> Result<DensityMatrix> {
    check_input(tau, shape)?;
    let (p, q) = (shape.p, shape.q());
    let bits = shape.grid_qubits();
    if bits > MAX_DIRECT_QUBITS || q > MAX_DIRECT_COLUMNS {
        return Err(Error::GuardExceeded {
            what: "direct average grid qubits",
            value: bits,
            limit: MAX_DIRECT_QUBITS,
        });
    }
    let dim = 1usize << bits;
    let col0: Vec<usize> = (0..p).map(|x| x * q).collect();
    let mask = col0.iter().fold(0usize, |m, &b| m | (1 << b));
    let gather = |i: usize| col0.iter().enumerate().fold(0usize, |a, (j, &b)| a | (((i >> b) & 1) << j));
    let mixed = (1u64 << (p * (q - 1))) as f64;
    let data = DMatrix::from_fn(dim, dim, |i, j| {
        if i & !mask == j & !mask {
            tau.get(gather(i), gather(j)) / mixed
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let mut rho = DensityMatrix::from_matrix(data)?;
    for x in 0..p {
        for &(c, t) in &ladder(shape.n, LadderOrder::Ascending) {
            rho.apply_cnot(x * q + c, x * q + t)?;
        }
    }
    let perms = ColumnPermutation::all(q);
    let weight = Complex64::new(1.0 / perms.len() as f64, 0.0);
    let mut acc = DMatrix::zeros(dim, dim);
    for perm in &perms {
        let dest: Vec<usize> = (0..dim)
            .map(|i| {
                (0..bits)
                    .filter(|b| i & (1 << b) != 0)
                    .fold(0usize, |a, b| a | (1 << ((b / q) * q + perm.apply(b % q))))
            })
            .collect();
        for j in 0..dim {
            for i in 0..dim {
                let v = rho.get(i, j);
                if v.re != 0.0 || v.im != 0.0 {
                    acc[(dest[i], dest[j])] += v * weight;
                }
            }
        }
    }
    DensityMatrix::from_matrix(acc)
}

/// Sparse real basis vectors of one joint eigenspace of the column swaps
/// `(0 1), (2 3), …`; `signs[k]` selects the symmetric or antisymmetric part
/// of pair `k`.
fn sector_basis(shape: &AuditShape, signs: &[bool]) -> Vec<Vec<(usize, f64)>> {
    let (p, q) = (shape.p, shape.q());
    let d = 1usize << p;
    let index = |digits: &[usize]| {
        digits.iter().enumerate().fold(0usize, |acc, (y, &a)| {
            (0..p).fold(acc, |acc, x| acc | (((a >> x) & 1) << (x * q + y)))
        })
    };
    // Per pair: list of local vectors, each a list of ((a, b), coeff).
    let pair_vectors = |symmetric: bool| {
        let mut out: Vec<Vec<((usize, usize), f64)>> = Vec::new();
        for a in 0..d {
            if symmetric {
                out.push(vec![((a, a), 1.0)]);
            }
            for b in a + 1..d {
                let s = if symmetric { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
                out.push(vec![((a, b), FRAC_1_SQRT_2), ((b, a), s)]);
            }
        }
        out
    };
    let sym = pair_vectors(true);
    let anti = pair_vectors(false);
    let mut partial: Vec<Vec<(Vec<usize>, f64)>> = vec![vec![(Vec::new(), 1.0)]];
    for &symmetric in signs {
        let local = if symmetric { &sym } else { &anti };
        let mut next = Vec::new();
        for support in &partial {
            for v in local {
                let combined = support
                    .iter()
                    .flat_map(|(digits, c)| {
                        v.iter().map(move |&((a, b), w)| {
                            let mut dg = digits.clone();
                            dg.extend([a, b]);
                            (dg, c * w)
                        })
                    })
                    .collect();
                next.push(combined);
            }
        }
        partial = next;
    }
    if q % 2 == 1 {
        let mut next = Vec::new();
        for support in &partial {
            for a in 0..d {
                let combined = support
                    .iter()
                    .map(|(digits, c)| {
                        let mut dg = digits.clone();
                        dg.push(a);
                        (dg, *c)
                    })
                    .collect();
                next.push(combined);
            }
        }
        partial = next;
    }
    partial
        .into_iter()
        .map(|support| support.iter().map(|(dg, c)| (index(dg), *c)).collect())
        .collect()
}

/// Trace norm of `2^{-pq} Σ w_k P_k` for an operator that commutes with all
/// column permutations, computed block by block over swap eigenspaces.
pub fn symmetric_trace_norm(terms: &BTreeMap<u64, f64>, shape: &AuditShape) -> f64 {
    let bits = shape.grid_qubits();
    let dim = 1usize << bits;
    let norm = 1.0 / dim as f64;
    let pairs = shape.q() / 2;
    let mut total = 0.0;
    for mask in 0..1usize << pairs {
        let signs: Vec<bool> = (0..pairs).map(|k| mask & (1 << k) == 0).collect();
        let basis = sector_basis(shape, &signs);
        let k = basis.len();
        if k == 0 {
            continue;
        }
        let mut reverse: Vec<Option<(usize, f64)>> = vec![None; dim];
        for (pos, v) in basis.iter().enumerate() {
            for &(i, c) in v {
                reverse[i] = Some((pos, c));
            }
        }
        let mut block = DMatrix::<Complex64>::zeros(k, k);
        for (&key, &w) in terms {
            if w == 0.0 {
                continue;
            }
            for (j, v) in basis.iter().enumerate() {
                for &(r, c) in v {
                    let (r2, phase) = pauli_basis_action(key, bits, r);
                    if let Some((i, c2)) = reverse[r2] {
                        block[(i, j)] += phase * (w * norm * c * c2);
                    }
                }
            }
        }
        let herm = (&block + block.adjoint()) * Complex64::new(0.5, 0.0);
        total += herm.symmetric_eigenvalues().iter().map(|l| l.abs()).sum::<f64>();
    }
    total
}

/// Trace-norm distance between the averaged encryptions of two inputs.
pub fn exact_security_distance(tau: &DensityMatrix, tau2: &DensityMatrix, shape: &AuditShape) -> Result<f64> {
    let mut diff = averaged_terms(tau, shape)?;
    for (key, w) in averaged_terms(tau2, shape)? {
        *diff.entry(key).or_insert(0.0) -= w;
    }
    Ok(symmetric_trace_norm(&diff, shape))
}

/// The same distance from full dense matrices and one eigendecomposition.
pub fn exact_security_distance_dense(tau: &DensityMatrix, tau2: &DensityMatrix, shape: &AuditShape) -> Result<f64> {
    trace_norm_distance(&averaged_ciphertext(tau, shape)?, &averaged_ciphertext(tau2, shape)?)
}

/// `C(n, k)` in floating point.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `2(4^p - 1) C(n+m, n)^{-1/2}`.
pub fn lemma4_bound(p: usize, n: usize, m: usize) -> Result<f64> {
    if p == 0 || n == 0 {
        return Err(Error::InvalidParams("bound needs p >= 1 and n >= 1".into()));
    }
    Ok(2.0 * (4f64.powi(p as i32) - 1.0) / binomial(n + m, n).sqrt())
}

/// `e (8n / (π(1 + 1/α)))^{1/4} 4^p exp(-(m/2) ln(1 + 1/α) - (n/2) ln(1 + α))`
/// with `α = m/n`.
pub fn theorem_eps(p: usize, n: usize, m: usize) -> f64 {
    let (nf, mf) = (n as f64, m as f64);
    let alpha = mf / nf;
    let inv = 1.0 + 1.0 / alpha;
    E * (8.0 * nf / (PI * inv)).powf(0.25)
        * 4f64.powi(p as i32)
        * (-(mf / 2.0) * inv.ln() - (nf / 2.0) * (1.0 + alpha).ln()).exp()
}

pub fn theorem_eps_bound(gamma: &Gamma) -> f64 {
    theorem_eps(gamma.p(), gamma.n(), gamma.m())
}

/// `(1/e²) √(2π(1/α + 1)/n) (1 + α)^n (1/α + 1)^{αn}` with `α = m/n`.
pub fn stirling_binomial_lower_bound(n: usize, m: usize) -> f64 {
    let (nf, mf) = (n as f64, m as f64);
    let alpha = mf / nf;
    let inv = 1.0 / alpha + 1.0;
    (2.0 * PI * inv / nf).sqrt() * (nf * (1.0 + alpha).ln() + alpha * nf * inv.ln() - 2.0).exp()
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub params: AuditShape,
    pub inputs: String,
    pub exact: f64,
    pub lemma4: f64,
    pub theorem_eps: f64,
    /// `exact ≤ lemma4` up to the eigen-solver tolerance.
    pub pass: bool,
}

pub const EIGEN_TOL: f64 = 1e-10;

pub fn audit_pair(shape: &AuditShape, inputs: &str, tau: &DensityMatrix, tau2: &DensityMatrix) -> Result<AuditReport> {
    let exact = exact_security_distance(tau, tau2, shape)?;
    let lemma4 = lemma4_bound(shape.p, shape.n, shape.m)?;
    Ok(AuditReport {
        params: *shape,
        inputs: inputs.to_string(),
        exact,
        lemma4,
        theorem_eps: theorem_eps(shape.p, shape.n, shape.m),
        pass: exact <= lemma4 + EIGEN_TOL,
    })
}

/// Basis pair `|0…0⟩, |1…1⟩`, `count` seeded random pure pairs and, for
/// `p ≥ 2`, GHZ against a random entangled state.
pub fn default_input_pairs(p: usize, seed: u64, count: usize) -> Result<Vec<(String, DensityMatrix, DensityMatrix)>> {
    let dim = 1usize << p;
    let mut pairs = vec![(
        "basis |0..0> vs |1..1>".to_string(),
        DensityMatrix::basis_state(p, 0)?,
        DensityMatrix::basis_state(p, dim - 1)?,
    )];
    for k in 0..count as u64 {
        let a = seed.wrapping_add(2 * k);
        pairs.push((
            format!("random:{a} vs random:{}", a + 1),
            PlainState::random_pure(p, a).density().clone(),
            PlainState::random_pure(p, a + 1).density().clone(),
        ));
    }
    if p >= 2 {
        pairs.push((
            format!("ghz vs random:{seed}"),
            PlainState::preset("ghz", p)?.density().clone(),
            PlainState::random_pure(p, seed).density().clone(),
        ));
    }
    Ok(pairs)
}
