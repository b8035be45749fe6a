//! Decryption: decode, measure the magic rows and select a copy.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::backend::{CipherState, DecodeCost, LogicalState};
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::params::Gamma;
use crate::scheme::key::SecretKey;

/// Exact enumeration is refused beyond this many measured rows.
pub const MAX_MEASURED_ROWS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecryptMode {
    /// Every measurement branch with its exact probability.
    Exact,
    /// One seeded sample of the measurement outcomes.
    Sampled { seed: u64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct DecryptResult {
    #[serde(skip)]
    pub rho_out: DensityMatrix,
    /// 1 when some copy implemented every T gate.
    pub f: u8,
    /// Failed T gates per copy, `c_β`.
    pub failures: Vec<usize>,
    /// The smallest copy with no failure, when `f = 1`.
    pub selected_copy: Option<usize>,
    /// Z outcomes (`+1` or `-1`) of the magic rows, copy-major.
    pub outcomes: Vec<i8>,
}

#[derive(Clone, Debug)]
pub struct DecryptBranch {
    pub probability: f64,
    pub result: DecryptResult,
}

#[derive(Clone, Debug)]
pub struct Decryption {
    pub branches: Vec<DecryptBranch>,
    pub cost: DecodeCost,
}

impl Decryption {
    pub fn success_probability(&self) -> f64 {
        self.branches.iter().filter(|b| b.result.f == 1).map(|b| b.probability).sum::<f64>() + 0.0
    }

    pub fn failure_probability(&self) -> f64 {
        self.branches.iter().filter(|b| b.result.f == 0).map(|b| b.probability).sum::<f64>() + 0.0
    }

    /// Output averaged over the branches with `f = 1`.
    pub fn conditional_output(&self) -> Result<Option<DensityMatrix>> {
        let p = self.success_probability();
        if p <= 0.0 {
            return Ok(None);
        }
        let mut acc: Option<DensityMatrix> = None;
        for b in self.branches.iter().filter(|b| b.result.f == 1) {
            match acc.as_mut() {
                None => {
                    let mut m = b.result.rho_out.clone();
                    m.scale(b.probability / p);
                    acc = Some(m);
                }
                Some(m) => m.add_scaled(&b.result.rho_out, b.probability / p)?,
            }
        }
        Ok(acc)
    }

    /// The most likely branch; the only one in sampled mode.
    pub fn primary(&self) -> &DecryptResult {
        &self
            .branches
            .iter()
            .max_by(|a, b| a.probability.total_cmp(&b.probability))
            .expect("at least one branch")
            .result
    }
}

fn leaf(gamma: &Gamma, state: &LogicalState, outcomes: Vec<i8>) -> Result<DecryptResult> {
    let t = gamma.t();
    let failures: Vec<usize> = (0..gamma.b())
        .map(|copy| outcomes[copy * t..(copy + 1) * t].iter().filter(|&&o| o < 0).count())
        .collect();
    let selected = failures.iter().position(|&c| c == 0);
    let copy = selected.unwrap_or(0);
    Ok(DecryptResult {
        rho_out: state.reduce(&gamma.data_rows(copy))?,
        f: selected.is_some() as u8,
        failures,
        selected_copy: selected,
        outcomes,
    })
}

fn enumerate(
    gamma: &Gamma,
    rows: &[usize],
    state: LogicalState,
    probability: f64,
    outcomes: &mut Vec<i8>,
    out: &mut Vec<DecryptBranch>,
) -> Result<()> {
    let Some((&row, rest)) = rows.split_first() else {
        out.push(DecryptBranch {
            probability,
            result: leaf(gamma, &state, outcomes.clone())?,
        });
        return Ok(());
    };
    let m = state.measure_z(row)?;
    let prob_minus = m.prob_minus();
    for (post, prob, sign) in [(m.post_plus, m.prob_plus, 1i8), (m.post_minus, prob_minus, -1i8)] {
        if let Some(post) = post {
            outcomes.push(sign);
            enumerate(gamma, rest, post, probability * prob, outcomes, out)?;
            outcomes.pop();
        }
    }
    Ok(())
}

/// `Dec_κ`: decode, measure Z on every magic row and pick the first copy
/// whose T gates all succeeded.
pub fn decrypt(key: &SecretKey, ct: &CipherState, mode: DecryptMode) -> Result<Decryption> {
    let gamma = *ct.gamma();
    let (state, cost) = ct.decode(key)?;
    let rows: Vec<usize> = (0..gamma.b()).flat_map(|c| gamma.magic_rows(c)).collect();
    let mut branches = Vec::new();
    match mode {
        DecryptMode::Exact => {
            if rows.len() > MAX_MEASURED_ROWS {
                return Err(Error::GuardExceeded {
                    what: "measured magic rows b*t",
                    value: rows.len(),
                    limit: MAX_MEASURED_ROWS,
                });
            }
            enumerate(&gamma, &rows, state, 1.0, &mut Vec::new(), &mut branches)?;
        }
        DecryptMode::Sampled { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut state = state;
            let mut outcomes = Vec::with_capacity(rows.len());
            let mut probability = 1.0;
            for &row in &rows {
                let m = state.measure_z(row)?;
                let plus = rng.gen::<f64>() < m.prob_plus;
                let (post, prob, sign) = if plus {
                    (m.post_plus, m.prob_plus, 1)
                } else {
                    (m.post_minus, 1.0 - m.prob_plus, -1)
                };
                state = post.ok_or_else(|| Error::Numeric("sampled an impossible outcome".into()))?;
                probability *= prob;
                outcomes.push(sign);
            }
            branches.push(DecryptBranch {
                probability,
                result: leaf(&gamma, &state, outcomes)?,
            });
        }
    }
    Ok(Decryption { branches, cost })
}
