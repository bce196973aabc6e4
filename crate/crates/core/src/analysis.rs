//! Backward light-cone pruning.
//!
//! Walking from the last gate to the first with a live set seeded by the
//! readout qubit, a rotation survives iff its target is live and a CNOT
//! survives iff it touches the live set, after which both of its qubits are
//! live. Every removed gate lies outside the causal past of the readout, so
//! `<Z_readout>` is unchanged for any input state.
//!
//! CNOTs whose target is dead could also be dropped for a Z readout; that
//! sharper rule is not applied here.

use std::fmt;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PruneReport {
    pub original_count: usize,
    pub pruned_count: usize,
    /// Indices into the original gate list, ascending.
    pub removed_gates: Vec<usize>,
    pub kept_circuit: Circuit,
}

impl fmt::Display for PruneReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "original gates: {}", self.original_count)?;
        writeln!(f, "effective gates: {}", self.pruned_count)?;
        let removed: Vec<String> = self.removed_gates.iter().map(usize::to_string).collect();
        writeln!(f, "removed indices: [{}]", removed.join(", "))
    }
}

pub fn prune_dead_gates(circuit: &Circuit, readout_qubit: usize) -> Result<PruneReport> {
    let n = circuit.n_qubits();
    if readout_qubit >= n {
        return Err(Error::QubitOutOfRange { index: readout_qubit, n_qubits: n });
    }
    let mut live = vec![false; n];
    live[readout_qubit] = true;
    let mut keep = vec![false; circuit.len()];

    for (i, gate) in circuit.gates().iter().enumerate().rev() {
        match *gate {
            Gate::Rotation { target, .. } => keep[i] = live[target],
            Gate::Cnot { control, target } => {
                if live[control] || live[target] {
                    keep[i] = true;
                    live[control] = true;
                    live[target] = true;
                }
            }
        }
    }

    let removed_gates: Vec<usize> = (0..keep.len()).filter(|&i| !keep[i]).collect();
    let kept: Vec<Gate> = circuit
        .gates()
        .iter()
        .zip(&keep)
        .filter_map(|(g, &k)| k.then_some(*g))
        .collect();
    Ok(PruneReport {
        original_count: circuit.len(),
        pruned_count: kept.len(),
        removed_gates,
        kept_circuit: Circuit::new(n, kept)?,
    })
}

pub fn effective_gate_count(circuit: &Circuit, readout_qubit: usize) -> Result<usize> {
    Ok(prune_dead_gates(circuit, readout_qubit)?.pruned_count)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn removes_isolated_rotation() {
        let c = Circuit::new(8, vec![Gate::rz(7, 0.3), Gate::ry(0, 1.1)]).unwrap();
        let report = prune_dead_gates(&c, 0).unwrap();
        assert_eq!(report.removed_gates, vec![0]);
        assert_eq!(report.kept_circuit.gates(), &[Gate::ry(0, 1.1)]);
        assert_eq!(report.pruned_count, 1);
    }

    #[test]
    fn keeps_cnot_touching_live_qubit() {
        let c = Circuit::new(2, vec![Gate::cnot(0, 1), Gate::ry(0, 0.4)]).unwrap();
        let report = prune_dead_gates(&c, 0).unwrap();
        assert!(report.removed_gates.is_empty());
        assert_eq!(report.kept_circuit, c);
    }

    #[test]
    fn cnot_propagates_liveness_backwards() {
        // q2 only reaches q0 through the CNOT, so the RX on q2 before it is live
        // and the RX on q2 after it is not.
        let c = Circuit::new(
            3,
            vec![Gate::rx(2, 0.1), Gate::rx(1, 0.2), Gate::cnot(2, 0), Gate::rx(2, 0.3)],
        )
        .unwrap();
        let report = prune_dead_gates(&c, 0).unwrap();
        assert_eq!(report.removed_gates, vec![1, 3]);
    }

    #[test]
    fn counts() {
        assert_eq!(effective_gate_count(&Circuit::empty(3).unwrap(), 0).unwrap(), 0);
        let one = Circuit::new(3, vec![Gate::rx(0, 1.0)]).unwrap();
        assert_eq!(effective_gate_count(&one, 0).unwrap(), 1);
        assert!(prune_dead_gates(&one, 3).is_err());
    }

    #[test]
    fn display() {
        let c = Circuit::new(2, vec![Gate::rz(1, 0.3), Gate::ry(0, 1.1)]).unwrap();
        let text = prune_dead_gates(&c, 0).unwrap().to_string();
        assert_eq!(text, "original gates: 2\neffective gates: 1\nremoved indices: [0]\n");
    }
}
