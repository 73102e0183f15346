use num_complex::Complex64;

use crate::bits::BitString;
use crate::error::{check_len, ForgeError, Result};
use crate::pauli::{phase_value, PauliString};

use super::circuit::Circuit;
use super::gate::Gate;

/// Dense amplitudes of an `n`-qubit pure state. Basis index bit `j` is qubit `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

/// Tolerance on the unit-norm invariant.
pub const NORM_TOLERANCE: f64 = 1e-10;

const MAX_SIM_QUBITS: usize = 26;

impl Statevector {
    /// `|0...0>`.
    pub fn zero(n_qubits: usize) -> Self {
        Statevector::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        assert!(n_qubits <= MAX_SIM_QUBITS, "register too large");
        assert!(index < 1 << n_qubits);
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { n_qubits, amps }
    }

    pub fn from_bitstring(b: &BitString) -> Self {
        Statevector::basis(b.len(), b.index())
    }

    /// Wrap amplitudes that must already be normalized.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(ForgeError::Input(format!(
                "amplitude count {len} is not a power of two"
            )));
        }
        let sv = Self {
            n_qubits: len.trailing_zeros() as usize,
            amps,
        };
        let norm = sv.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(ForgeError::Input(format!("state has squared norm {norm}")));
        }
        Ok(sv)
    }

    /// Normalize arbitrary nonzero amplitudes.
    pub fn normalized(mut amps: Vec<Complex64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(ForgeError::Input("cannot normalize a zero vector".into()));
        }
        for a in &mut amps {
            *a /= norm;
        }
        Statevector::from_amplitudes(amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn inner(&self, other: &Statevector) -> Result<Complex64> {
        check_len(self.n_qubits, other.n_qubits)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `self` on the low qubits, `other` on the high qubits.
    pub fn tensor(&self, other: &Statevector) -> Statevector {
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for hi in &other.amps {
            for lo in &self.amps {
                amps.push(lo * hi);
            }
        }
        Statevector {
            n_qubits: self.n_qubits + other.n_qubits,
            amps,
        }
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        let targets = gate.targets();
        if let Some(&q) = targets.iter().find(|&&q| q >= self.n_qubits) {
            return Err(ForgeError::Input(format!(
                "gate `{gate}` targets qubit {q} outside a {}-qubit state",
                self.n_qubits
            )));
        }
        match *gate {
            Gate::X(q) => {
                let bit = 1 << q;
                for i in 0..self.amps.len() {
                    if i & bit == 0 {
                        self.amps.swap(i, i | bit);
                    }
                }
            }
            Gate::Z(q) => {
                let bit = 1 << q;
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & bit != 0 {
                        *a = -*a;
                    }
                }
            }
            Gate::Cnot(c, t) => {
                let (cb, tb) = (1 << c, 1 << t);
                for i in 0..self.amps.len() {
                    if i & cb != 0 && i & tb == 0 {
                        self.amps.swap(i, i | tb);
                    }
                }
            }
            Gate::Cz(a, b) => {
                let mask = (1 << a) | (1 << b);
                for (i, amp) in self.amps.iter_mut().enumerate() {
                    if i & mask == mask {
                        *amp = -*amp;
                    }
                }
            }
            _ => {
                let m = gate
                    .matrix()
                    .ok_or_else(|| ForgeError::UnboundParameter(gate.to_string()))?;
                if targets.len() == 1 {
                    let m = [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]];
                    self.apply_1q(targets[0], m);
                } else {
                    let mut local = [[Complex64::new(0.0, 0.0); 4]; 4];
                    for (r, row) in local.iter_mut().enumerate() {
                        for (c, v) in row.iter_mut().enumerate() {
                            *v = m[(r, c)];
                        }
                    }
                    self.apply_2q(targets[0], targets[1], &local);
                }
            }
        }
        Ok(())
    }

    fn apply_1q(&mut self, q: usize, m: [Complex64; 4]) {
        let bit = 1 << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let j = i | bit;
                let (a, b) = (self.amps[i], self.amps[j]);
                self.amps[i] = m[0] * a + m[1] * b;
                self.amps[j] = m[2] * a + m[3] * b;
            }
        }
    }

    /// Local index is `2 * bit(first) + bit(second)`.
    fn apply_2q(&mut self, first: usize, second: usize, m: &[[Complex64; 4]; 4]) {
        let (fb, sb) = (1 << first, 1 << second);
        for i in 0..self.amps.len() {
            if i & (fb | sb) != 0 {
                continue;
            }
            let idx = [i, i | sb, i | fb, i | fb | sb];
            let v = idx.map(|k| self.amps[k]);
            for (r, &k) in idx.iter().enumerate() {
                self.amps[k] = m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2] + m[r][3] * v[3];
            }
        }
    }

    /// Apply every gate of a fully bound circuit in order.
    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        check_len(self.n_qubits, circuit.n_qubits())?;
        if let Some(g) = circuit.gates().iter().find(|g| !g.is_bound()) {
            return Err(ForgeError::UnboundParameter(g.to_string()));
        }
        for g in circuit.gates() {
            self.apply_gate(g)?;
        }
        Ok(())
    }

    pub fn evolved(mut self, circuit: &Circuit) -> Result<Statevector> {
        self.apply_circuit(circuit)?;
        Ok(self)
    }

    /// Multiply by a Pauli operator in place.
    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        check_len(self.n_qubits, p.len())?;
        let x = p.x_mask() as usize;
        let z = p.z_mask() as usize;
        let base = phase_value(((p.y_count() % 4) as u8 + if p.is_negative() { 2 } else { 0 }) % 4);
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (j, a) in self.amps.iter().enumerate() {
            let s = if (j & z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            out[j ^ x] = a * base * s;
        }
        self.amps = out;
        Ok(())
    }

    /// `<psi|P|psi>`.
    pub fn pauli_expectation_complex(&self, p: &PauliString) -> Result<Complex64> {
        check_len(self.n_qubits, p.len())?;
        let x = p.x_mask() as usize;
        let z = p.z_mask() as usize;
        let base = phase_value(((p.y_count() % 4) as u8 + if p.is_negative() { 2 } else { 0 }) % 4);
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, a) in self.amps.iter().enumerate() {
            let s = if (j & z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            acc += self.amps[j ^ x].conj() * a * s;
        }
        Ok(acc * base)
    }

    /// Real expectation of a Hermitian Pauli string.
    pub fn pauli_expectation(&self, p: &PauliString) -> Result<f64> {
        Ok(self.pauli_expectation_complex(p)?.re)
    }

    /// Amplitudes viewed as a matrix `M[low][high]` for a bipartition at `split`.
    pub fn bipartite_matrix(&self, split: usize) -> nalgebra::DMatrix<Complex64> {
        let rows = 1usize << split;
        let cols = 1usize << (self.n_qubits - split);
        nalgebra::DMatrix::from_fn(rows, cols, |r, c| self.amps[r + c * rows])
    }
}

/// Expectation of a Pauli string on the output of a circuit from `|0...0>`.
pub fn pauli_expectation(state: &Statevector, p: &PauliString) -> Result<f64> {
    state.pauli_expectation(p)
}

/// Run `circuit` on `state`.
pub fn apply_circuit(state: Statevector, circuit: &Circuit) -> Result<Statevector> {
    state.evolved(circuit)
}
