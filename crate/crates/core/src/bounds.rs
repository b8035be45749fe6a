//! Failure probabilities of the `b`-copy construction and their tail bounds.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Probability that every one of `b` copies fails, each succeeding with
/// probability `2^{-t}`.
pub fn exact_failure_prob(b: usize, t: usize) -> f64 {
    if t == 0 {
        return 0.0;
    }
    (1.0 - 0.5f64.powi(t as i32)).powi(b as i32)
}

fn delta_exponent(b: usize, t: usize) -> f64 {
    let (bf, tf) = (b as f64, t as i32);
    -bf * 2f64.powi(1 - 2 * tf) + bf.sqrt() * 2f64.powi(2 - tf) - 2.0
}

/// `exp(-b 2^{1-2t} + √b 2^{2-t} - 2)` for `t ≥ 1`, zero for `t = 0`.
/// Values above one are returned as is.
pub fn theorem_delta(b: usize, t: usize) -> f64 {
    if t == 0 {
        0.0
    } else {
        delta_exponent(b, t).exp()
    }
}

/// `exp(-2((b-1) - b(1-2^{-t}))² / b)`.
pub fn hoeffding_failure_bound(b: usize, t: usize) -> Result<f64> {
    if b == 0 || t == 0 {
        return Err(Error::InvalidParams("hoeffding bound needs b >= 1 and t >= 1".into()));
    }
    let bf = b as f64;
    let gap = (bf - 1.0) - bf * (1.0 - 0.5f64.powi(t as i32));
    Ok((-2.0 * gap * gap / bf).exp())
}

/// Real-valued `(√(-ln δ / 2) + 1)² 4^t`.
pub fn min_copies_real(t: usize, delta: f64) -> f64 {
    ((-delta.ln() / 2.0).sqrt() + 1.0).powi(2) * 4f64.powi(t as i32)
}

/// Smallest integer `b` meeting the copy-count inequality.
pub fn min_copies(t: usize, delta: f64) -> Result<usize> {
    if t == 0 {
        return Err(Error::InvalidParams("min_copies needs t >= 1".into()));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParams(format!("target delta {delta} outside (0, 1)")));
    }
    let b = min_copies_real(t, delta).ceil() as usize;
    if exact_failure_prob(b, t) > delta {
        return Err(Error::Numeric(format!(
            "b = {b} copies fail with probability {} > {delta}",
            exact_failure_prob(b, t)
        )));
    }
    Ok(b)
}

/// Fraction of `trials` in which all `b` copies fail.
pub fn monte_carlo_failure(b: usize, t: usize, trials: u64, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidParams("trials must be at least 1".into()));
    }
    if t == 0 {
        return Ok(0.0);
    }
    let success = 0.5f64.powi(t as i32);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let failures = (0..trials)
        .filter(|_| (0..b).all(|_| !rng.gen_bool(success)))
        .count();
    Ok(failures as f64 / trials as f64)
}

/// Where `theorem_delta(b, t) ≥ exact_failure_prob(b, t)` for `b ≤ b_max`.
#[derive(Clone, Debug, Serialize)]
pub struct DeltaRegion {
    pub t: usize,
    pub b_max: usize,
    /// Smallest `b0` with the inequality holding on all of `b0..=b_max`.
    pub holds_from: Option<usize>,
    pub violations: Vec<usize>,
}

impl DeltaRegion {
    pub fn contains(&self, b: usize) -> bool {
        b <= self.b_max && self.holds_from.is_some_and(|b0| b >= b0)
    }
}

/// Compared in log space so both sides stay finite for large `b`.
pub fn delta_dominates(b: usize, t: usize) -> bool {
    if t == 0 {
        return true;
    }
    let log_exact = b as f64 * (1.0 - 0.5f64.powi(t as i32)).ln();
    delta_exponent(b, t) >= log_exact
}

pub fn delta_region(t: usize, b_max: usize) -> DeltaRegion {
    let violations: Vec<usize> = (1..=b_max).filter(|&b| !delta_dominates(b, t)).collect();
    let holds_from = match violations.last() {
        None => Some(1),
        Some(&v) if v < b_max => Some(v + 1),
        Some(_) => None,
    };
    DeltaRegion {
        t,
        b_max,
        holds_from,
        violations,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Empirical {
    pub failure: f64,
    pub trials: u64,
    pub seed: u64,
    pub std_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReliabilityReport {
    pub t: usize,
    pub b: usize,
    pub exact_failure: f64,
    pub hoeffding_bound: Option<f64>,
    pub theorem_delta: f64,
    pub delta_vacuous: bool,
    pub delta_target: f64,
    pub min_copies_for_target: Option<usize>,
    pub empirical_failure: Option<Empirical>,
}

impl ReliabilityReport {
    pub fn new(b: usize, t: usize, delta_target: f64) -> Result<Self> {
        if b == 0 {
            return Err(Error::InvalidParams("b must be at least 1".into()));
        }
        let delta = theorem_delta(b, t);
        Ok(ReliabilityReport {
            t,
            b,
            exact_failure: exact_failure_prob(b, t),
            hoeffding_bound: hoeffding_failure_bound(b, t).ok(),
            theorem_delta: delta,
            delta_vacuous: delta >= 1.0,
            delta_target,
            min_copies_for_target: if t == 0 { None } else { Some(min_copies(t, delta_target)?) },
            empirical_failure: None,
        })
    }

    pub fn with_monte_carlo(mut self, trials: u64, seed: u64) -> Result<Self> {
        let p = self.exact_failure;
        self.empirical_failure = Some(Empirical {
            failure: monte_carlo_failure(self.b, self.t, trials, seed)?,
            trials,
            seed,
            std_error: (p * (1.0 - p) / trials as f64).sqrt(),
        });
        Ok(self)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub t: usize,
    pub b: usize,
    pub exact: f64,
    pub hoeffding: Option<f64>,
    pub theorem_delta: f64,
}

pub fn sweep(ts: &[usize], bs: &[usize]) -> Vec<SweepRow> {
    ts.iter()
        .flat_map(|&t| {
            bs.iter().filter(|&&b| b >= 1).map(move |&b| SweepRow {
                t,
                b,
                exact: exact_failure_prob(b, t),
                hoeffding: hoeffding_failure_bound(b, t).ok(),
                theorem_delta: theorem_delta(b, t),
            })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("t,b,exact,hoeffding,theorem_delta\n");
    for r in rows {
        let h = r.hoeffding.map(|h| format!("{h:e}")).unwrap_or_default();
        out.push_str(&format!("{},{},{:e},{},{:e}\n", r.t, r.b, r.exact, h, r.theorem_delta));
    }
    out
}
