//! Dense statevector engine.
//!
//! Qubit `j` is bit `j` of the basis index (qubit 0 least significant). Text
//! formats print qubit 0 first.

mod circuit;
mod gate;
mod layout;
mod measure;
mod noise;
mod statevector;

pub use circuit::Circuit;
pub(crate) use circuit::strip_comment;
pub use gate::{Angle, Gate};
pub use layout::{check_line_layout, line_adjacency};
pub use measure::{basis_rotation, measure_samples, Counts, OutcomeSampler};
pub use noise::{sample_noisy, NoiseModel};
pub(crate) use noise::noisy_outcomes;
pub use statevector::{apply_circuit, pauli_expectation, Statevector, NORM_TOLERANCE};

/// Replace every gate `G` by `G, G^-1, G`. The unitary is unchanged while
/// the gate count triples.
pub fn fold_circuit(circuit: &Circuit) -> Circuit {
    let mut folded = Circuit::new(circuit.n_qubits());
    for g in circuit.gates() {
        for h in [g.clone(), g.inverse(), g.clone()] {
            folded.push(h).expect("folded gate stays in range");
        }
    }
    folded
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense;

    #[test]
    fn fold_examples() {
        let h = Circuit::parse(1, "H 0").unwrap();
        assert_eq!(fold_circuit(&h).gates(), &[Gate::H(0), Gate::H(0), Gate::H(0)]);
        assert!(fold_circuit(&Circuit::new(3)).is_empty());

        let hop = Circuit::parse(2, "HOP 0 1 0.37").unwrap();
        let folded = fold_circuit(&hop);
        assert_eq!(
            folded.gates()[1],
            Gate::Hop(0, 1, Angle::Fixed(-0.37))
        );
        let diff = dense::max_abs_diff(
            &dense::circuit_unitary(&folded),
            &dense::circuit_unitary(&hop),
        );
        assert!(diff < 1e-12);
    }

    #[test]
    fn green_circle_identity() {
        // HOP = (SWAP first, then the core gate), with core = HOP * SWAP.
        let phi = 0.81;
        let hop = Circuit::parse(2, &format!("HOP 0 1 {phi}")).unwrap();
        let swap = Circuit::parse(2, "SWAP 0 1").unwrap();
        let core = dense::circuit_unitary(&hop) * dense::circuit_unitary(&swap);
        let rebuilt = &core * dense::circuit_unitary(&swap);
        assert!(dense::max_abs_diff(&rebuilt, &dense::circuit_unitary(&hop)) < 1e-15);
        // Swapping the targets of a hop flips the sign of its angle.
        let flipped = Circuit::parse(2, &format!("HOP 1 0 {}", -phi)).unwrap();
        assert!(
            dense::max_abs_diff(&dense::circuit_unitary(&flipped), &dense::circuit_unitary(&hop))
                < 1e-15
        );
    }
}
