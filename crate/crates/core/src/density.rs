//! Small dense density matrices and state metrics.
//!
//! Qubit `k` of a matrix is bit `k` of the basis index (least significant
//! bit first). The trace norm is the Schatten-1 norm without a factor ½, so
//! the distance between two density matrices lies in `[0, 2]`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gates::Matrix2;
use crate::pauli::{packed_get, PauliLabel};

/// Largest matrix the dense helpers will build.
pub const MAX_DENSE_QUBITS: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    qubits: usize,
    data: DMatrix<Complex64>,
}

fn guard(qubits: usize) -> Result<()> {
    if qubits > MAX_DENSE_QUBITS {
        return Err(Error::GuardExceeded {
            what: "dense matrix qubit count",
            value: qubits,
            limit: MAX_DENSE_QUBITS,
        });
    }
    Ok(())
}

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::DimensionMismatch {
            expected: dim.next_power_of_two(),
            found: dim,
        });
    }
    Ok(dim.trailing_zeros() as usize)
}

/// `σ|i⟩ = φ |i ⊕ x⟩` for a packed label string on `k` qubits.
#[inline]
pub(crate) fn pauli_basis_action(key: u64, k: usize, i: usize) -> (usize, Complex64) {
    let mut j = i;
    let mut phase = Complex64::new(1.0, 0.0);
    for q in 0..k {
        let bit = (i >> q) & 1;
        match packed_get(key, q) {
            PauliLabel::I => {}
            PauliLabel::X => j ^= 1 << q,
            PauliLabel::Y => {
                j ^= 1 << q;
                phase *= if bit == 0 {
                    Complex64::new(0.0, 1.0)
                } else {
                    Complex64::new(0.0, -1.0)
                };
            }
            PauliLabel::Z => {
                if bit == 1 {
                    phase = -phase;
                }
            }
        }
    }
    (j, phase)
}

impl DensityMatrix {
    /// Wraps a square matrix of dimension `2^k` without checking positivity.
    pub fn from_matrix(data: DMatrix<Complex64>) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::DimensionMismatch {
                expected: data.nrows(),
                found: data.ncols(),
            });
        }
        let qubits = qubits_for_dim(data.nrows())?;
        guard(qubits)?;
        Ok(DensityMatrix { qubits, data })
    }

    pub fn from_pure(amplitudes: &[Complex64]) -> Result<Self> {
        let qubits = qubits_for_dim(amplitudes.len())?;
        guard(qubits)?;
        let v = nalgebra::DVector::from_column_slice(amplitudes);
        Ok(DensityMatrix {
            qubits,
            data: &v * v.adjoint(),
        })
    }

    pub fn basis_state(qubits: usize, index: usize) -> Result<Self> {
        guard(qubits)?;
        let dim = 1 << qubits;
        let mut data = DMatrix::zeros(dim, dim);
        data[(index, index)] = Complex64::new(1.0, 0.0);
        Ok(DensityMatrix { qubits, data })
    }

    pub fn maximally_mixed(qubits: usize) -> Result<Self> {
        guard(qubits)?;
        let dim = 1usize << qubits;
        let data = DMatrix::from_diagonal_element(dim, dim, Complex64::new(1.0 / dim as f64, 0.0));
        Ok(DensityMatrix { qubits, data })
    }

    /// `(1/2^k) Σ c_v σ_v` from packed label strings.
    pub fn from_pauli_terms<I>(qubits: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, f64)>,
    {
        guard(qubits)?;
        let dim = 1usize << qubits;
        let norm = 1.0 / dim as f64;
        let mut data = DMatrix::zeros(dim, dim);
        for (key, coeff) in terms {
            for i in 0..dim {
                let (j, phase) = pauli_basis_action(key, qubits, i);
                data[(j, i)] += phase * (coeff * norm);
            }
        }
        Ok(DensityMatrix { qubits, data })
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[(row, col)]
    }

    pub fn trace(&self) -> Complex64 {
        self.data.trace()
    }

    pub fn scale(&mut self, factor: f64) {
        self.data *= Complex64::new(factor, 0.0);
    }

    pub fn add_scaled(&mut self, other: &DensityMatrix, factor: f64) -> Result<()> {
        self.same_shape(other)?;
        self.data += &other.data * Complex64::new(factor, 0.0);
        Ok(())
    }

    fn same_shape(&self, other: &DensityMatrix) -> Result<()> {
        if self.qubits != other.qubits {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    /// `self ⊗ high`, with `self` on the low qubits.
    pub fn tensor(&self, high: &DensityMatrix) -> Result<Self> {
        let qubits = self.qubits + high.qubits;
        guard(qubits)?;
        let dl = self.dim();
        let dim = dl * high.dim();
        let data = DMatrix::from_fn(dim, dim, |i, j| high.data[(i / dl, j / dl)] * self.data[(i % dl, j % dl)]);
        Ok(DensityMatrix { qubits, data })
    }

    /// Reduced state on `keep`; qubit `j` of the result is `keep[j]`.
    pub fn partial_trace_keep(&self, keep: &[usize]) -> Result<Self> {
        let mut mask = 0usize;
        for &k in keep {
            if k >= self.qubits || mask & (1 << k) != 0 {
                return Err(Error::IndexOutOfRange(format!("qubit {k} in partial trace")));
            }
            mask |= 1 << k;
        }
        let rest: Vec<usize> = (0..self.qubits).filter(|q| mask & (1 << q) == 0).collect();
        let spread = |bits: usize, positions: &[usize]| {
            positions
                .iter()
                .enumerate()
                .fold(0usize, |acc, (j, &pos)| acc | (((bits >> j) & 1) << pos))
        };
        let dk = 1usize << keep.len();
        let keep_idx: Vec<usize> = (0..dk).map(|a| spread(a, keep)).collect();
        let mut data = DMatrix::zeros(dk, dk);
        for r in 0..(1usize << rest.len()) {
            let base = spread(r, &rest);
            for a in 0..dk {
                for b in 0..dk {
                    data[(a, b)] += self.data[(base | keep_idx[a], base | keep_idx[b])];
                }
            }
        }
        Ok(DensityMatrix {
            qubits: keep.len(),
            data,
        })
    }

    /// `ρ ← u ρ u†` on one qubit.
    pub fn apply_1q(&mut self, u: &Matrix2, qubit: usize) -> Result<()> {
        if qubit >= self.qubits {
            return Err(Error::IndexOutOfRange(format!("qubit {qubit} of {}", self.qubits)));
        }
        let bit = 1usize << qubit;
        let dim = self.dim();
        // left multiplication acts on rows
        for col in 0..dim {
            for i0 in (0..dim).filter(|i| i & bit == 0) {
                let i1 = i0 | bit;
                let (a, b) = (self.data[(i0, col)], self.data[(i1, col)]);
                self.data[(i0, col)] = u[0][0] * a + u[0][1] * b;
                self.data[(i1, col)] = u[1][0] * a + u[1][1] * b;
            }
        }
        // right multiplication by u† acts on columns
        for row in 0..dim {
            for j0 in (0..dim).filter(|j| j & bit == 0) {
                let j1 = j0 | bit;
                let (a, b) = (self.data[(row, j0)], self.data[(row, j1)]);
                self.data[(row, j0)] = a * u[0][0].conj() + b * u[0][1].conj();
                self.data[(row, j1)] = a * u[1][0].conj() + b * u[1][1].conj();
            }
        }
        Ok(())
    }

    /// `ρ ← P ρ P†` for the basis permutation `|i⟩ ↦ |f(i)⟩`.
    pub fn permute_basis<F: Fn(usize) -> usize>(&mut self, f: F) {
        let dim = self.dim();
        let map: Vec<usize> = (0..dim).map(&f).collect();
        let mut out = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                out[(map[i], map[j])] = self.data[(i, j)];
            }
        }
        self.data = out;
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        if control >= self.qubits || target >= self.qubits || control == target {
            return Err(Error::IndexOutOfRange(format!("CNOT({control}, {target}) on {} qubits", self.qubits)));
        }
        let (c, t) = (1usize << control, 1usize << target);
        self.permute_basis(|i| if i & c != 0 { i ^ t } else { i });
        Ok(())
    }

    /// `tr(σ ρ)` for a packed label string.
    pub fn pauli_expectation(&self, key: u64) -> f64 {
        (0..self.dim())
            .map(|k| {
                let (j, phase) = pauli_basis_action(key, self.qubits, k);
                phase * self.data[(k, j)]
            })
            .sum::<Complex64>()
            .re
    }

    /// All `4^k` coefficients `c_v = tr(σ_v ρ)`, indexed by packed label string.
    pub fn pauli_coefficients(&self) -> Vec<f64> {
        (0..1u64 << (2 * self.qubits)).map(|key| self.pauli_expectation(key)).collect()
    }

    pub fn hermitian_defect(&self) -> f64 {
        (&self.data - self.data.adjoint()).camax()
    }

    /// Checks Hermiticity, unit trace and positivity within the given tolerances.
    pub fn validate(&self, hermitian_tol: f64, trace_tol: f64, psd_tol: f64) -> Result<()> {
        if self.hermitian_defect() > hermitian_tol {
            return Err(Error::Numeric("matrix is not Hermitian".into()));
        }
        if (self.trace() - Complex64::new(1.0, 0.0)).norm() > trace_tol {
            return Err(Error::Numeric(format!("trace {} is not 1", self.trace())));
        }
        let min = self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min < -psd_tol {
            return Err(Error::Numeric(format!("negative eigenvalue {min}")));
        }
        Ok(())
    }

    fn hermitian_part(&self) -> DMatrix<Complex64> {
        (&self.data + self.data.adjoint()) * Complex64::new(0.5, 0.0)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.hermitian_part().symmetric_eigenvalues().iter().copied().collect()
    }

    /// Spectral decomposition `Σ λ |v⟩⟨v|`, keeping eigenvalues above `cutoff`.
    pub fn pure_components(&self, cutoff: f64) -> Vec<(f64, Vec<Complex64>)> {
        let eig = SymmetricEigen::new(self.hermitian_part());
        let mut out: Vec<(f64, Vec<Complex64>)> = eig
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > cutoff)
            .map(|(k, &l)| (l, eig.eigenvectors.column(k).iter().copied().collect()))
            .collect();
        out.sort_by(|a, b| b.0.total_cmp(&a.0));
        out
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> Result<f64> {
        self.same_shape(other)?;
        Ok((&self.data - &other.data).camax())
    }
}

/// Schatten-1 norm of `a - b`.
pub fn trace_norm_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    a.same_shape(b)?;
    let diff = &a.data - &b.data;
    let herm = (&diff + diff.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(herm.symmetric_eigenvalues().iter().map(|l| l.abs()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates;
    use crate::pauli::LogicalPauliVector;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn trace_norm_examples() {
        let zero = DensityMatrix::basis_state(1, 0).unwrap();
        let one = DensityMatrix::basis_state(1, 1).unwrap();
        let plus = DensityMatrix::from_pure(&[c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)]).unwrap();
        assert!(trace_norm_distance(&zero, &zero).unwrap().abs() < 1e-15);
        assert!((trace_norm_distance(&zero, &one).unwrap() - 2.0).abs() < 1e-12);
        assert!((trace_norm_distance(&zero, &plus).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        let two = DensityMatrix::maximally_mixed(2).unwrap();
        assert!(trace_norm_distance(&zero, &two).is_err());
    }

    #[test]
    fn partial_trace_of_product() {
        let zero = DensityMatrix::basis_state(1, 0).unwrap();
        let plus = DensityMatrix::from_pure(&[c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)]).unwrap();
        let mixed = DensityMatrix::maximally_mixed(1).unwrap();
        let prod = zero.tensor(&plus).unwrap().tensor(&mixed).unwrap();
        assert!(prod.partial_trace_keep(&[0]).unwrap().max_abs_diff(&zero).unwrap() < 1e-14);
        assert!(prod.partial_trace_keep(&[1]).unwrap().max_abs_diff(&plus).unwrap() < 1e-14);
        assert!(prod.partial_trace_keep(&[2]).unwrap().max_abs_diff(&mixed).unwrap() < 1e-14);
        let swapped = prod.partial_trace_keep(&[1, 0]).unwrap();
        assert!(swapped.max_abs_diff(&plus.tensor(&zero).unwrap()).unwrap() < 1e-14);
        assert!(prod.partial_trace_keep(&[0, 1, 2]).unwrap().max_abs_diff(&prod).unwrap() < 1e-14);
        assert!(prod.partial_trace_keep(&[3]).is_err());
    }

    #[test]
    fn pauli_round_trip() {
        let amps = [c(0.6), Complex64::new(0.0, 0.8), c(0.0), c(0.0)];
        let rho = DensityMatrix::from_pure(&amps).unwrap();
        let coeffs = rho.pauli_coefficients();
        assert!((coeffs[0] - 1.0).abs() < 1e-14);
        let back = DensityMatrix::from_pauli_terms(2, coeffs.iter().enumerate().map(|(k, &v)| (k as u64, v))).unwrap();
        assert!(back.max_abs_diff(&rho).unwrap() < 1e-14);
    }

    #[test]
    fn pauli_action_matches_matrices() {
        // single-qubit labels against their 2x2 matrices
        for l in PauliLabel::ALL {
            let key = LogicalPauliVector::new(vec![l]).pack();
            let m = l.matrix();
            for i in 0..2 {
                let (j, ph) = pauli_basis_action(key, 1, i);
                assert!((m[j][i] - ph).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn unitary_application() {
        let mut rho = DensityMatrix::basis_state(2, 0).unwrap();
        rho.apply_1q(&gates::hadamard(), 0).unwrap();
        rho.apply_cnot(0, 1).unwrap();
        // Bell state: <ZZ> = 1, <XX> = 1
        let zz = LogicalPauliVector::new(vec![PauliLabel::Z, PauliLabel::Z]).pack();
        let xx = LogicalPauliVector::new(vec![PauliLabel::X, PauliLabel::X]).pack();
        assert!((rho.pauli_expectation(zz) - 1.0).abs() < 1e-14);
        assert!((rho.pauli_expectation(xx) - 1.0).abs() < 1e-14);
        rho.validate(1e-12, 1e-12, 1e-9).unwrap();
    }

    #[test]
    fn spectral_components() {
        let mut rho = DensityMatrix::maximally_mixed(1).unwrap();
        rho.scale(0.5);
        rho.add_scaled(&DensityMatrix::basis_state(1, 0).unwrap(), 0.5).unwrap();
        let comps = rho.pure_components(1e-12);
        assert_eq!(comps.len(), 2);
        assert!((comps[0].0 - 0.75).abs() < 1e-12);
        let mut rebuilt = DensityMatrix::from_pure(&comps[0].1).unwrap();
        rebuilt.scale(comps[0].0);
        let mut second = DensityMatrix::from_pure(&comps[1].1).unwrap();
        second.scale(comps[1].0);
        rebuilt.add_scaled(&second, 1.0).unwrap();
        assert!(rebuilt.max_abs_diff(&rho).unwrap() < 1e-12);
    }

    #[test]
    fn guard_rejects_large() {
        assert!(DensityMatrix::maximally_mixed(MAX_DENSE_QUBITS + 1).is_err());
    }
}
