//! Single-qubit gate matrices.
//!
//! Conventions: `S = diag(1, i)`, `T = diag(1, e^{iπ/4})`, `H = (X + Z)/√2`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type Matrix2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// The single-qubit Clifford gates the evaluator applies transversally.
///
/// `T` is deliberately not a member: it never conjugates Paulis in the scheme
/// and only enters through magic states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CliffordGate {
    X,
    Y,
    Z,
    H,
    S,
}

impl CliffordGate {
    pub const ALL: [CliffordGate; 5] = [
        CliffordGate::X,
        CliffordGate::Y,
        CliffordGate::Z,
        CliffordGate::H,
        CliffordGate::S,
    ];

    pub fn matrix(self) -> Matrix2 {
        match self {
            CliffordGate::X => pauli_x(),
            CliffordGate::Y => pauli_y(),
            CliffordGate::Z => pauli_z(),
            CliffordGate::H => hadamard(),
            CliffordGate::S => [[ONE, ZERO], [ZERO, I]],
        }
    }

    pub fn mnemonic(self) -> &'static str {
        match self {
            CliffordGate::X => "X",
            CliffordGate::Y => "Y",
            CliffordGate::Z => "Z",
            CliffordGate::H => "H",
            CliffordGate::S => "S",
        }
    }

    pub fn is_self_inverse(self) -> bool {
        !matches!(self, CliffordGate::S)
    }
}

impl fmt::Display for CliffordGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.mnemonic())
    }
}

impl FromStr for CliffordGate {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "X" => Ok(CliffordGate::X),
            "Y" => Ok(CliffordGate::Y),
            "Z" => Ok(CliffordGate::Z),
            "H" => Ok(CliffordGate::H),
            "S" => Ok(CliffordGate::S),
            other => Err(format!("unknown single-qubit Clifford '{other}'")),
        }
    }
}

pub fn identity() -> Matrix2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

pub fn pauli_x() -> Matrix2 {
    [[ZERO, ONE], [ONE, ZERO]]
}

/// `Y = i X Z`.
pub fn pauli_y() -> Matrix2 {
    [[ZERO, -I], [I, ZERO]]
}

pub fn pauli_z() -> Matrix2 {
    [[ONE, ZERO], [ZERO, -ONE]]
}

pub fn hadamard() -> Matrix2 {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

pub fn t_gate() -> Matrix2 {
    [
        [ONE, ZERO],
        [ZERO, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)],
    ]
}

pub fn mul(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn dagger(a: &Matrix2) -> Matrix2 {
    [
        [a[0][0].conj(), a[1][0].conj()],
        [a[0][1].conj(), a[1][1].conj()],
    ]
}

pub fn apply(a: &Matrix2, v: [Complex64; 2]) -> [Complex64; 2] {
    [
        a[0][0] * v[0] + a[0][1] * v[1],
        a[1][0] * v[0] + a[1][1] * v[1],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Matrix2, b: &Matrix2) -> bool {
        (0..2).all(|i| (0..2).all(|j| (a[i][j] - b[i][j]).norm() < 1e-14))
    }

    #[test]
    fn y_is_i_x_z() {
        let xz = mul(&pauli_x(), &pauli_z());
        let ixz = xz.map(|row| row.map(|c| c * I));
        assert!(close(&ixz, &pauli_y()));
    }

    #[test]
    fn cliffords_are_unitary() {
        for g in CliffordGate::ALL {
            let m = g.matrix();
            assert!(close(&mul(&m, &dagger(&m)), &identity()), "{g}");
        }
        let t = t_gate();
        assert!(close(&mul(&t, &dagger(&t)), &identity()));
    }

    #[test]
    fn t_squared_is_s() {
        let t = t_gate();
        assert!(close(&mul(&t, &t), &CliffordGate::S.matrix()));
    }

    #[test]
    fn mnemonic_round_trip() {
        for g in CliffordGate::ALL {
            assert_eq!(g.mnemonic().parse::<CliffordGate>().unwrap(), g);
        }
        assert!("T".parse::<CliffordGate>().is_err());
    }
}
