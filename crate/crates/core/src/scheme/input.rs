//! Plaintext states, the magic state and input-block assembly.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::gates;
use crate::params::Gamma;

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-9;

/// `|T⟩ = TH|0⟩`.
pub fn magic_state() -> [Complex64; 2] {
    let zero = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    gates::apply(&gates::t_gate(), gates::apply(&gates::hadamard(), zero))
}

pub fn magic_density() -> DensityMatrix {
    DensityMatrix::from_pure(&magic_state()).expect("one qubit")
}

/// A validated `r`-qubit plaintext state.
#[derive(Clone, Debug, PartialEq)]
pub struct PlainState {
    rho: DensityMatrix,
}

impl PlainState {
    pub fn from_density(rho: DensityMatrix) -> Result<Self> {
        rho.validate(HERMITIAN_TOL, TRACE_TOL, PSD_TOL)?;
        Ok(PlainState { rho })
    }

    pub fn from_pure(amplitudes: &[Complex64]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > TRACE_TOL {
            return Err(Error::Numeric(format!("state vector has squared norm {norm}")));
        }
        PlainState::from_density(DensityMatrix::from_pure(amplitudes)?)
    }

    /// Named presets: `zero`, `one`, `plus`, `ghz`, `magic` and `random:<seed>`.
    pub fn preset(name: &str, r: usize) -> Result<Self> {
        let dim = 1usize << r;
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        match name.trim() {
            "zero" => amps[0] = Complex64::new(1.0, 0.0),
            "one" => amps[dim - 1] = Complex64::new(1.0, 0.0),
            "plus" => amps.fill(Complex64::new((dim as f64).sqrt().recip(), 0.0)),
            "ghz" => {
                amps[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
                amps[dim - 1] = Complex64::new(FRAC_1_SQRT_2, 0.0);
            }
            "magic" => {
                let t = magic_state();
                for (i, a) in amps.iter_mut().enumerate() {
                    *a = (0..r).map(|k| t[(i >> k) & 1]).product();
                }
            }
            other => {
                let seed = other
                    .strip_prefix("random:")
                    .and_then(|s| s.parse::<u64>().ok())
                    .ok_or_else(|| Error::InvalidParams(format!("unknown state preset '{other}'")))?;
                return Ok(PlainState::random_pure(r, seed));
            }
        }
        PlainState::from_pure(&amps)
    }

    /// Haar-random pure state from complex Gaussian amplitudes.
    pub fn random_pure(r: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut amps: Vec<Complex64> = (0..1usize << r)
            .map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        PlainState::from_pure(&amps).expect("normalized")
    }

    pub fn num_qubits(&self) -> usize {
        self.rho.num_qubits()
    }

    pub fn density(&self) -> &DensityMatrix {
        &self.rho
    }
}

/// The `p`-qubit column state `τ` fed to encryption.
#[derive(Clone, Debug, PartialEq)]
pub struct InputBlock {
    gamma: Gamma,
    tau: DensityMatrix,
}

/// `b` copies of `ρ ⊗ |T⟩⟨T|^{⊗t}`, copy 0 on the lowest rows.
pub fn assemble_input(rho: &PlainState, gamma: &Gamma) -> Result<InputBlock> {
    if rho.num_qubits() != gamma.r() {
        return Err(Error::DimensionMismatch {
            expected: gamma.r(),
            found: rho.num_qubits(),
        });
    }
    let magic = magic_density();
    let mut copy = rho.density().clone();
    for _ in 0..gamma.t() {
        copy = copy.tensor(&magic)?;
    }
    let mut tau = copy.clone();
    for _ in 1..gamma.b() {
        tau = tau.tensor(&copy)?;
    }
    Ok(InputBlock { gamma: *gamma, tau })
}

impl InputBlock {
    /// Any `p`-qubit state, including ones entangled across rows.
    pub fn from_state(gamma: &Gamma, tau: DensityMatrix) -> Result<Self> {
        if tau.num_qubits() != gamma.p() {
            return Err(Error::DimensionMismatch {
                expected: gamma.p(),
                found: tau.num_qubits(),
            });
        }
        tau.validate(HERMITIAN_TOL, 1e-10, PSD_TOL)?;
        Ok(InputBlock { gamma: *gamma, tau })
    }

    pub fn gamma(&self) -> &Gamma {
        &self.gamma
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.tau
    }

    /// Nonzero coefficients `c_v = tr(σ_v τ)` keyed by packed label vector.
    pub fn pauli_coefficients(&self, cutoff: f64) -> BTreeMap<u64, f64> {
        self.tau
            .pauli_coefficients()
            .into_iter()
            .enumerate()
            .filter(|(_, c)| c.abs() > cutoff)
            .map(|(k, c)| (k as u64, c))
            .collect()
    }

    pub fn pure_components(&self) -> Vec<(f64, Vec<Complex64>)> {
        self.tau.pure_components(1e-13)
    }
}
