//! The per-row encoding ladder `U_x` and its inverse.
//!
//! `U_x` acts on columns `0..n` of one row. It applies `CNOT(j → 0)` for every
//! `j ≥ 1`, then `CNOT(0 → j)` for every `j ≥ 1`. Each group shares an endpoint
//! on column 0 and is internally commuting, so the order inside a group is free.

use crate::error::Result;
use crate::pauli::check_code_length;

/// Order of the CNOTs inside each of the two commuting groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LadderOrder {
    /// Ascending control, then ascending target.
    Ascending,
    /// Descending control, then ascending target.
    DescendingControls,
    /// Descending control, then descending target.
    Descending,
}

/// `(control, target)` column pairs of `U_x` in application order.
pub fn encoding_cnots(n: usize, order: LadderOrder) -> Result<Vec<(usize, usize)>> {
    check_code_length(n)?;
    Ok(ladder(n, order))
}

/// The ladder for any `n ≥ 1`, without the code-length constraint.
pub fn ladder(n: usize, order: LadderOrder) -> Vec<(usize, usize)> {
    let asc: Vec<usize> = (1..n).collect();
    let desc: Vec<usize> = (1..n).rev().collect();
    let (into_first, out_of_first) = match order {
        LadderOrder::Ascending => (&asc, &asc),
        LadderOrder::DescendingControls => (&desc, &asc),
        LadderOrder::Descending => (&desc, &desc),
    };
    let mut gates: Vec<(usize, usize)> = into_first.iter().map(|&j| (j, 0)).collect();
    gates.extend(out_of_first.iter().map(|&j| (0, j)));
    gates
}

/// `(control, target)` column pairs of `U_x†` in application order.
pub fn decoding_cnots(n: usize, order: LadderOrder) -> Result<Vec<(usize, usize)>> {
    let mut gates = encoding_cnots(n, order)?;
    gates.reverse();
    Ok(gates)
}
