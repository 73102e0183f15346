//! Clifford circuits acting on signed Pauli strings by conjugation.

use std::fmt;

use crate::error::{check_len, ForgeError, Result};
use crate::pauli::PauliString;
use crate::sim::{Circuit, Gate};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CliffordGate {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Cnot(usize, usize),
    Cz(usize, usize),
}

impl CliffordGate {
    pub fn targets(&self) -> Vec<usize> {
        use CliffordGate::*;
        match *self {
            H(q) | S(q) | Sdg(q) | X(q) | Y(q) | Z(q) => vec![q],
            Cnot(a, b) | Cz(a, b) => vec![a, b],
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, CliffordGate::Cnot(..) | CliffordGate::Cz(..))
    }

    pub fn inverse(&self) -> CliffordGate {
        match *self {
            CliffordGate::S(q) => CliffordGate::Sdg(q),
            CliffordGate::Sdg(q) => CliffordGate::S(q),
            g => g,
        }
    }

    pub fn to_gate(&self) -> Gate {
        use CliffordGate::*;
        match *self {
            H(q) => Gate::H(q),
            S(q) => Gate::S(q),
            Sdg(q) => Gate::Sdg(q),
            X(q) => Gate::X(q),
            Y(q) => Gate::Y(q),
            Z(q) => Gate::Z(q),
            Cnot(c, t) => Gate::Cnot(c, t),
            Cz(a, b) => Gate::Cz(a, b),
        }
    }

    /// `g P g†`, tracking the sign exactly.
    pub fn conjugate(&self, p: &PauliString) -> PauliString {
        let (mut x, mut z, mut neg) = (p.x_mask(), p.z_mask(), p.is_negative());
        let bit = |m: u64, q: usize| (m >> q) & 1 == 1;
        match *self {
            CliffordGate::H(q) => {
                let (xq, zq) = (bit(x, q), bit(z, q));
                neg ^= xq && zq;
                x = set_bit(x, q, zq);
                z = set_bit(z, q, xq);
            }
            CliffordGate::S(q) => {
                neg ^= bit(x, q) && bit(z, q);
                z ^= x & (1 << q);
            }
            CliffordGate::Sdg(q) => {
                neg ^= bit(x, q) && !bit(z, q);
                z ^= x & (1 << q);
            }
            CliffordGate::X(q) => neg ^= bit(z, q),
            CliffordGate::Z(q) => neg ^= bit(x, q),
            CliffordGate::Y(q) => neg ^= bit(x, q) ^ bit(z, q),
            CliffordGate::Cnot(c, t) => {
                neg ^= bit(x, c) && bit(z, t) && !(bit(x, t) ^ bit(z, c));
                if bit(x, c) {
                    x ^= 1 << t;
                }
                if bit(z, t) {
                    z ^= 1 << c;
                }
            }
            CliffordGate::Cz(a, b) => {
                neg ^= bit(x, a) && bit(x, b) && (bit(z, a) ^ bit(z, b));
                if bit(x, b) {
                    z ^= 1 << a;
                }
                if bit(x, a) {
                    z ^= 1 << b;
                }
            }
        }
        PauliString::from_masks(p.len(), x, z, neg)
    }
}

fn set_bit(m: u64, q: usize, v: bool) -> u64 {
    if v {
        m | (1 << q)
    } else {
        m & !(1 << q)
    }
}

impl fmt::Display for CliffordGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_gate())
    }
}

/// Ordered Clifford gate list; the first gate acts first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CliffordCircuit {
    n_qubits: usize,
    gates: Vec<CliffordGate>,
}

impl CliffordCircuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(n_qubits: usize, gates: Vec<CliffordGate>) -> Result<Self> {
        let mut c = CliffordCircuit::new(n_qubits);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[CliffordGate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, g: CliffordGate) -> Result<()> {
        let t = g.targets();
        if let Some(&q) = t.iter().find(|&&q| q >= self.n_qubits) {
            return Err(ForgeError::Input(format!(
                "{g} targets qubit {q} outside a {}-qubit register",
                self.n_qubits
            )));
        }
        if t.len() == 2 && t[0] == t[1] {
            return Err(ForgeError::Input(format!("{g} repeats a target")));
        }
        self.gates.push(g);
        Ok(())
    }

    /// `self` followed by `other`.
    pub fn then(mut self, other: &CliffordCircuit) -> CliffordCircuit {
        assert_eq!(self.n_qubits, other.n_qubits);
        self.gates.extend_from_slice(&other.gates);
        self
    }

    pub fn inverse(&self) -> CliffordCircuit {
        CliffordCircuit {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().rev().map(|g| g.inverse()).collect(),
        }
    }

    /// Number of CNOT and CZ gates.
    pub fn cnot_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }

    /// `C P C†` for the circuit unitary `C`.
    pub fn image(&self, p: &PauliString) -> Result<PauliString> {
        check_len(self.n_qubits, p.len())?;
        Ok(self.gates.iter().fold(*p, |acc, g| g.conjugate(&acc)))
    }

    /// `C† P C` for the circuit unitary `C`.
    pub fn preimage(&self, p: &PauliString) -> Result<PauliString> {
        check_len(self.n_qubits, p.len())?;
        Ok(self
            .gates
            .iter()
            .rev()
            .fold(*p, |acc, g| g.inverse().conjugate(&acc)))
    }

    pub fn to_circuit(&self) -> Circuit {
        Circuit::from_gates(
            self.n_qubits,
            self.gates.iter().map(|g| g.to_gate()).collect(),
        )
        .expect("clifford gates were validated on push")
    }
}

impl fmt::Display for CliffordCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_circuit(), f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense;
    use crate::pauli::Letter;

    fn all_paulis(n: usize) -> Vec<PauliString> {
        let letters = [Letter::I, Letter::X, Letter::Y, Letter::Z];
        (0..4usize.pow(n as u32))
            .map(|mut k| {
                let mut p = PauliString::identity(n);
                for q in 0..n {
                    p.set(q, letters[k % 4]);
                    k /= 4;
                }
                p
            })
            .collect()
    }

    #[test]
    fn gate_conjugation_matches_dense() {
        use CliffordGate::*;
        let gates = [
            H(0), S(1), Sdg(0), X(1), Y(0), Z(1), Cnot(0, 1), Cnot(1, 0), Cz(0, 1),
        ];
        for g in gates {
            let c = CliffordCircuit::from_gates(2, vec![g]).unwrap();
            let u = dense::circuit_unitary(&c.to_circuit());
            for p in all_paulis(2) {
                for p in [p, p.negated()] {
                    let want = &u * dense::pauli_matrix(&p) * u.adjoint();
                    let got = dense::pauli_matrix(&g.conjugate(&p));
                    assert!(dense::max_abs_diff(&want, &got) < 1e-12, "{g} on {p}");
                }
            }
        }
    }

    #[test]
    fn image_and_preimage_invert_each_other() {
        use CliffordGate::*;
        let c = CliffordCircuit::from_gates(
            3,
            vec![H(0), Cnot(0, 2), S(2), Cz(1, 2), Sdg(1), Y(0), Cnot(2, 1)],
        )
        .unwrap();
        let u = dense::circuit_unitary(&c.to_circuit());
        for p in all_paulis(3) {
            let img = c.image(&p).unwrap();
            assert_eq!(c.preimage(&img).unwrap(), p);
            let want = &u * dense::pauli_matrix(&p) * u.adjoint();
            assert!(dense::max_abs_diff(&want, &dense::pauli_matrix(&img)) < 1e-12);
        }
        assert_eq!(c.cnot_count(), 3);
        assert_eq!(c.inverse().inverse(), c);
    }

    #[test]
    fn rejects_bad_targets() {
        let mut c = CliffordCircuit::new(2);
        assert!(c.push(CliffordGate::H(2)).is_err());
        assert!(c.push(CliffordGate::Cnot(1, 1)).is_err());
    }
}
