//! Logical circuits `(V_1, …, V_d)` over `{X, Y, Z, H, S, CNOT, T}`.
//!
//! Text format, one gate per line, applied in file order (`V_1` first):
//!
//! ```text
//! # comment
//! H 0
//! CNOT 0 1
//! T 1
//! ```
//!
//! Qubit indices are 0-based.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::gates::{self, CliffordGate};
use crate::params::Gamma;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    Clifford { gate: CliffordGate, qubit: usize },
    Cnot { control: usize, target: usize },
    T { qubit: usize },
}

impl Gate {
    pub fn is_t(&self) -> bool {
        matches!(self, Gate::T { .. })
    }

    fn max_qubit(&self) -> usize {
        match *self {
            Gate::Clifford { qubit, .. } | Gate::T { qubit } => qubit,
            Gate::Cnot { control, target } => control.max(target),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::Clifford { gate, qubit } => write!(f, "{gate} {qubit}"),
            Gate::Cnot { control, target } => write!(f, "CNOT {control} {target}"),
            Gate::T { qubit } => write!(f, "T {qubit}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CircuitErrorKind {
    #[error("unknown mnemonic '{0}'")]
    UnknownMnemonic(String),
    #[error("qubit index {index} out of range for {qubits} qubits")]
    IndexOutOfRange { index: usize, qubits: usize },
    #[error("CNOT control and target are both {0}")]
    EqualEndpoints(usize),
    #[error("malformed line: {0}")]
    Malformed(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{}{kind}", .line.map(|l| format!("line {l}: ")).unwrap_or_default())]
pub struct CircuitError {
    /// 1-based line number when the error comes from parsing.
    pub line: Option<usize>,
    pub kind: CircuitErrorKind,
}

/// Why a circuit cannot be evaluated under a given `γ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Violation {
    QubitCount { circuit: usize, gamma: usize },
    TCount { circuit: usize, gamma: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::QubitCount { circuit, gamma } => {
                write!(f, "circuit acts on {circuit} qubits but r = {gamma}")
            }
            Violation::TCount { circuit, gamma } => {
                write!(f, "circuit has {circuit} T gates but t = {gamma}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize, gates: Vec<Gate>) -> std::result::Result<Self, CircuitError> {
        for g in &gates {
            check_gate(g, num_qubits).map_err(|kind| CircuitError { line: None, kind })?;
        }
        Ok(Circuit { num_qubits, gates })
    }

    pub fn empty(num_qubits: usize) -> Self {
        Circuit {
            num_qubits,
            gates: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn t_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_t()).count()
    }

    /// Number of T gates among `V_1..V_i` (`i` is 1-based, `1 <= i <= d`).
    pub fn t_prefix_count(&self, i: usize) -> Result<usize> {
        if i == 0 || i > self.gates.len() {
            return Err(Error::IndexOutOfRange(format!(
                "gate index {i} outside 1..={}",
                self.gates.len()
            )));
        }
        Ok(self.gates[..i].iter().filter(|g| g.is_t()).count())
    }

    pub fn validate_for_gamma(&self, gamma: &Gamma) -> std::result::Result<(), Vec<Violation>> {
        let mut violations = Vec::new();
        if self.num_qubits != gamma.r() {
            violations.push(Violation::QubitCount {
                circuit: self.num_qubits,
                gamma: gamma.r(),
            });
        }
        if self.t_count() != gamma.t() {
            violations.push(Violation::TCount {
                circuit: self.t_count(),
                gamma: gamma.t(),
            });
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations)
        }
    }

    pub fn to_text(&self) -> String {
        self.gates.iter().map(|g| format!("{g}\n")).collect()
    }

    /// `V_d … V_1 ρ V_1† … V_d†` on the plaintext qubits.
    pub fn apply_to(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.num_qubits() != self.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                found: rho.num_qubits(),
            });
        }
        let mut out = rho.clone();
        for g in &self.gates {
            match *g {
                Gate::Clifford { gate, qubit } => out.apply_1q(&gate.matrix(), qubit)?,
                Gate::Cnot { control, target } => out.apply_cnot(control, target)?,
                Gate::T { qubit } => out.apply_1q(&gates::t_gate(), qubit)?,
            }
        }
        Ok(out)
    }
}

fn check_gate(g: &Gate, qubits: usize) -> std::result::Result<(), CircuitErrorKind> {
    if let Gate::Cnot { control, target } = *g {
        if control == target {
            return Err(CircuitErrorKind::EqualEndpoints(control));
        }
    }
    let max = g.max_qubit();
    if max >= qubits {
        return Err(CircuitErrorKind::IndexOutOfRange { index: max, qubits });
    }
    Ok(())
}

/// Parses the line format for a circuit on `num_qubits` qubits.
pub fn parse_circuit(text: &str, num_qubits: usize) -> std::result::Result<Circuit, CircuitError> {
    let mut gates = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |kind| CircuitError { line: Some(line), kind };
        let mut tokens = content.split_whitespace();
        let mnemonic = tokens.next().unwrap();
        let args: Vec<usize> = tokens
            .map(|tok| {
                tok.parse::<usize>()
                    .map_err(|_| err(CircuitErrorKind::Malformed(format!("'{tok}' is not a qubit index"))))
            })
            .collect::<std::result::Result<_, _>>()?;
        let arity = |want: usize| {
            if args.len() == want {
                Ok(())
            } else {
                Err(err(CircuitErrorKind::Malformed(format!(
                    "{mnemonic} takes {want} qubit(s), got {}",
                    args.len()
                ))))
            }
        };
        let gate = match mnemonic {
            "CNOT" => {
                arity(2)?;
                Gate::Cnot {
                    control: args[0],
                    target: args[1],
                }
            }
            "T" => {
                arity(1)?;
                Gate::T { qubit: args[0] }
            }
            other => {
                let gate = other
                    .parse::<CliffordGate>()
                    .map_err(|_| err(CircuitErrorKind::UnknownMnemonic(other.to_string())))?;
                arity(1)?;
                Gate::Clifford { gate, qubit: args[0] }
            }
        };
        check_gate(&gate, num_qubits).map_err(err)?;
        gates.push(gate);
    }
    Ok(Circuit { num_qubits, gates })
}

fn random_clifford_gate<R: Rng>(rng: &mut R, r: usize) -> Gate {
    let choices = if r >= 2 { 6 } else { 5 };
    match rng.gen_range(0..choices) {
        5 => {
            let control = rng.gen_range(0..r);
            let mut target = rng.gen_range(0..r - 1);
            if target >= control {
                target += 1;
            }
            Gate::Cnot { control, target }
        }
        k => Gate::Clifford {
            gate: CliffordGate::ALL[k],
            qubit: rng.gen_range(0..r),
        },
    }
}

/// A seeded random circuit of `d` gates over `{X, Y, Z, H, S, CNOT}`.
pub fn random_clifford_circuit(r: usize, d: usize, seed: u64) -> Circuit {
    assert!(r >= 1, "need at least one qubit");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gates = (0..d).map(|_| random_clifford_gate(&mut rng, r)).collect();
    Circuit { num_qubits: r, gates }
}

/// A seeded random Clifford circuit of `d` gates with `t` T gates inserted at
/// random positions.
pub fn random_clifford_t_circuit(r: usize, d: usize, t: usize, seed: u64) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut gates = random_clifford_circuit(r, d, seed).gates;
    for _ in 0..t {
        let at = rng.gen_range(0..=gates.len());
        gates.insert(at, Gate::T { qubit: rng.gen_range(0..r) });
    }
    Circuit { num_qubits: r, gates }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_examples() {
        let c = parse_circuit("H 0\nCNOT 0 1", 2).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.gates()[1], Gate::Cnot { control: 0, target: 1 });

        let c = parse_circuit("T 0", 1).unwrap();
        assert_eq!(c.t_count(), 1);

        let e = parse_circuit("CNOT 0 0", 2).unwrap_err();
        assert_eq!(e.kind, CircuitErrorKind::EqualEndpoints(0));
        assert_eq!(e.line, Some(1));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let e = parse_circuit("# header\nH 0\nQ 1\n", 2).unwrap_err();
        assert_eq!(e.line, Some(3));
        assert!(matches!(e.kind, CircuitErrorKind::UnknownMnemonic(_)));

        let e = parse_circuit("H 0\n\nX 5", 2).unwrap_err();
        assert_eq!(e.line, Some(3));
        assert_eq!(e.kind, CircuitErrorKind::IndexOutOfRange { index: 5, qubits: 2 });

        let e = parse_circuit("CNOT 1", 2).unwrap_err();
        assert!(matches!(e.kind, CircuitErrorKind::Malformed(_)));
        let e = parse_circuit("H one", 2).unwrap_err();
        assert!(matches!(e.kind, CircuitErrorKind::Malformed(_)));
        assert!(e.to_string().starts_with("line 1:"));
    }

    #[test]
    fn comments_and_blank_lines() {
        let c = parse_circuit("  # nothing\n\nS 0 # trailing\n", 1).unwrap();
        assert_eq!(c.gates(), &[Gate::Clifford { gate: CliffordGate::S, qubit: 0 }]);
        assert!(parse_circuit("", 3).unwrap().is_empty());
    }

    #[test]
    fn t_prefix() {
        let c = parse_circuit("H 0\nT 0\nT 0", 1).unwrap();
        assert_eq!(c.t_prefix_count(3).unwrap(), 2);
        assert_eq!(c.t_prefix_count(1).unwrap(), 0);
        assert_eq!(c.t_prefix_count(c.len()).unwrap(), c.t_count());
        assert!(c.t_prefix_count(0).is_err());
        assert!(c.t_prefix_count(4).is_err());
        let prefix: Vec<_> = (1..=3).map(|i| c.t_prefix_count(i).unwrap()).collect();
        assert!(prefix.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn gamma_validation() {
        let one_t = parse_circuit("T 0", 2).unwrap();
        let two_t = parse_circuit("T 0\nT 1", 2).unwrap();
        let three_q = parse_circuit("H 2", 3).unwrap();
        let g = Gamma::new(1, 2, 1, 5, 1).unwrap();
        assert!(one_t.validate_for_gamma(&g).is_ok());
        assert_eq!(
            two_t.validate_for_gamma(&g).unwrap_err(),
            vec![Violation::TCount { circuit: 2, gamma: 1 }]
        );
        let v = three_q.validate_for_gamma(&g).unwrap_err();
        assert!(v.contains(&Violation::QubitCount { circuit: 3, gamma: 2 }));
    }

    #[test]
    fn random_generators() {
        assert!(random_clifford_circuit(2, 0, 11).is_empty());
        assert_eq!(random_clifford_circuit(2, 30, 5), random_clifford_circuit(2, 30, 5));
        let c = random_clifford_circuit(1, 5, 7);
        assert_eq!(c.len(), 5);
        assert!(c.gates().iter().all(|g| matches!(g, Gate::Clifford { .. })));
        let ct = random_clifford_t_circuit(2, 10, 3, 1);
        assert_eq!(ct.t_count(), 3);
        assert_eq!(ct.len(), 13);
    }

    proptest! {
        #[test]
        fn text_round_trip(r in 1usize..5, d in 0usize..40, t in 0usize..4, seed: u64) {
            let c = random_clifford_t_circuit(r, d, t, seed);
            let text = c.to_text();
            let parsed = parse_circuit(&text, r).unwrap();
            prop_assert_eq!(&parsed, &c);
            let t_lines = text.lines().filter(|l| l.starts_with("T ")).count();
            if !c.is_empty() {
                prop_assert_eq!(c.t_prefix_count(c.len()).unwrap(), t_lines);
            }
        }
    }
}
