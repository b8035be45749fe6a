//! Row-level schedule of the transversal operations performed by evaluation.

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::gates::CliffordGate;
use crate::params::Gamma;

/// One transversal operation, applied to every column of the grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowOp {
    Clifford { gate: CliffordGate, row: usize },
    Cnot { control: usize, target: usize },
}

/// Expands a circuit into transversal row operations over all copies.
///
/// The `α`-th T gate on qubit `z` becomes `CNOT(data → magic α)` followed by
/// `CNOT(magic α → data)` in every copy; the magic rows are measured later.
pub fn transversal_schedule(circuit: &Circuit, gamma: &Gamma) -> Result<Vec<RowOp>> {
    circuit.validate_for_gamma(gamma).map_err(Error::CircuitMismatch)?;
    let mut ops = Vec::new();
    let mut alpha = 0;
    for gate in circuit.gates() {
        for copy in 0..gamma.b() {
            match *gate {
                Gate::Clifford { gate, qubit } => ops.push(RowOp::Clifford {
                    gate,
                    row: gamma.data_row(copy, qubit),
                }),
                Gate::Cnot { control, target } => ops.push(RowOp::Cnot {
                    control: gamma.data_row(copy, control),
                    target: gamma.data_row(copy, target),
                }),
                Gate::T { qubit } => {
                    let data = gamma.data_row(copy, qubit);
                    let magic = gamma.magic_row(copy, alpha);
                    ops.push(RowOp::Cnot {
                        control: data,
                        target: magic,
                    });
                    ops.push(RowOp::Cnot {
                        control: magic,
                        target: data,
                    });
                }
            }
        }
        if gate.is_t() {
            alpha += 1;
        }
    }
    Ok(ops)
}
