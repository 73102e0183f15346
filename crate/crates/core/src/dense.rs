//! Dense-matrix reference routines.
//!
//! These build operators with explicit Kronecker products and basis loops and
//! share no kernels with the statevector engine, so tests can use them as an
//! independent check on it.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::pauli::{Letter, PauliString};
use crate::sim::{Circuit, Gate};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn letter_matrix(letter: Letter) -> CMatrix {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match letter {
        Letter::I => CMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        Letter::X => CMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        Letter::Y => CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        Letter::Z => CMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Matrix of a signed Pauli string; qubit 0 is the least significant index bit.
pub fn pauli_matrix(p: &PauliString) -> CMatrix {
    let mut m = CMatrix::from_element(1, 1, c(p.sign(), 0.0));
    // Leftmost Kronecker factor is the most significant bit.
    for q in (0..p.len()).rev() {
        m = kron(&m, &letter_matrix(p.letter(q)));
    }
    m
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Embed a gate's local matrix into an `n`-qubit register by an explicit
/// loop over basis pairs.
pub fn embed_gate(gate: &Gate, n: usize) -> CMatrix {
    let local = gate.matrix().expect("gate must be bound");
    let targets = gate.targets();
    let dim = 1usize << n;
    let mut out = CMatrix::zeros(dim, dim);
    let mask: usize = targets.iter().map(|&q| 1usize << q).sum();
    let local_index = |basis: usize| -> usize {
        targets
            .iter()
            .fold(0usize, |acc, &q| (acc << 1) | ((basis >> q) & 1))
    };
    for row in 0..dim {
        for col in 0..dim {
            if row & !mask != col & !mask {
                continue;
            }
            out[(row, col)] = local[(local_index(row), local_index(col))];
        }
    }
    out
}

/// Unitary of a bound circuit as an ordered matrix product.
pub fn circuit_unitary(circuit: &Circuit) -> CMatrix {
    let n = circuit.n_qubits();
    let mut u = identity(1 << n);
    for gate in circuit.gates() {
        u = embed_gate(gate, n) * u;
    }
    u
}

pub fn basis_vector(dim: usize, index: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    v[index] = c(1.0, 0.0);
    v
}

pub fn outer(a: &CVector, b: &CVector) -> CMatrix {
    a * b.adjoint()
}

pub fn expectation(op: &CMatrix, state: &CVector) -> Complex64 {
    (state.adjoint() * op * state)[(0, 0)]
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest entry deviation after removing the best global phase.
pub fn max_abs_diff_up_to_phase(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    let (idx, _) = b
        .iter()
        .enumerate()
        .fold((0, 0.0), |(bi, bv), (i, v)| {
            if v.norm() > bv {
                (i, v.norm())
            } else {
                (bi, bv)
            }
        });
    let (ra, rb) = (a.as_slice()[idx], b.as_slice()[idx]);
    if rb.norm() < 1e-300 {
        return max_abs_diff(a, b);
    }
    let phase = ra / rb;
    let phase = phase / phase.norm();
    max_abs_diff(a, &b.map(|v| v * phase))
}

/// Entry-wise complex conjugate.
pub fn conj(a: &CMatrix) -> CMatrix {
    a.map(|v| v.conj())
}

/// Lowest eigenvalue of a Hermitian matrix.
pub fn ground_energy(h: &CMatrix) -> f64 {
    let eig = nalgebra::SymmetricEigen::new(h.clone());
    eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}
