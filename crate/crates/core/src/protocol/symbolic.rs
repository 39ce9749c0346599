//! Label-level simulation.
//!
//! Every state met by the protocol is diagonal in a Bell basis, so the
//! auxiliary pair is fully described by its amplitude index `j` (the phase
//! index never feeds back into the verdict). Counter gates add the control's
//! shift to `j` modulo `d`.

use crate::arith::ceil_log2;
use crate::error::{domain, Result};
use crate::model::{ErrorLabel, Verdict};

/// Auxiliary qudit Bell pair `|Φ^d_{0j}⟩` tracked by its amplitude index.
///
/// `pure` is false when the register was drawn from an isotropic mixture.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymbolicAux {
    pub d: u64,
    pub j: u64,
    pub pure: bool,
}

impl SymbolicAux {
    pub fn new(d: u64, j: u64) -> Result<Self> {
        if d < 2 {
            return domain(format!("auxiliary dimension must be >= 2, got {d}"));
        }
        if j >= d {
            return domain(format!("amplitude index {j} out of range for d = {d}"));
        }
        Ok(Self { d, j, pure: true })
    }

    /// The ideal register `|Φ^d_00⟩`.
    pub fn pure(d: u64) -> Result<Self> {
        Self::new(d, 0)
    }

    fn shifted(self, by: i64) -> Self {
        let d = self.d as i128;
        Self { j: (self.j as i128 + by as i128).rem_euclid(d) as u64, ..self }
    }
}

/// Counter gate with a qubit-pair control in the given class.
pub fn counter_update(label: ErrorLabel, aux: SymbolicAux) -> SymbolicAux {
    aux.shifted(label.shift())
}

/// Generalized counter gate with a qudit-pair control in the product basis
/// state `|m⟩|n⟩`: `j → j - n + m`.
pub fn qudit_counter_update(m: u64, n: u64, aux: SymbolicAux) -> SymbolicAux {
    aux.shifted(m as i64 - n as i64)
}

/// Applies the error number gate for a whole ensemble.
pub fn run_eng<'a>(labels: impl IntoIterator<Item = &'a ErrorLabel>, aux: SymbolicAux) -> SymbolicAux {
    labels.into_iter().fold(aux, |acc, label| counter_update(*label, acc))
}

/// Measures the amplitude index; accepts iff it is zero.
pub fn readout_full(aux: &SymbolicAux) -> (Verdict, u64) {
    let verdict = if aux.j == 0 { Verdict::Accept } else { Verdict::Reject };
    (verdict, aux.j)
}

/// Outcome of a subspace readout.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SubspaceOutcome {
    pub verdict: Verdict,
    /// Parity rounds actually performed (stops at the first odd parity).
    pub rounds_done: u32,
    /// Remaining register after the last even round, if any round was even.
    pub residual: Option<SymbolicAux>,
}

/// Measures `rounds` qubit-pair parities, least significant first. Each even
/// round halves the register (`j → j/2`, `d → d/2`); the first odd round
/// rejects.
pub fn readout_subspace(aux: &SymbolicAux, rounds: u32) -> Result<SubspaceOutcome> {
    if !aux.d.is_power_of_two() {
        return domain(format!("subspace readout needs a power-of-two dimension, got {}", aux.d));
    }
    let k = ceil_log2(aux.d);
    if rounds == 0 || rounds > k {
        return domain(format!("rounds must lie in 1..={k}, got {rounds}"));
    }
    let mut cur = *aux;
    let mut residual = None;
    for r in 1..=rounds {
        if cur.j & 1 == 1 {
            return Ok(SubspaceOutcome { verdict: Verdict::Reject, rounds_done: r, residual });
        }
        cur = SymbolicAux { d: cur.d / 2, j: cur.j / 2, ..cur };
        residual = Some(cur);
    }
    Ok(SubspaceOutcome { verdict: Verdict::Accept, rounds_done: rounds, residual })
}
