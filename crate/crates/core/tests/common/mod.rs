//! Shared helpers for the integration tests.
#![allow(dead_code)]

use forge_core::dense::{self, CMatrix};
use forge_core::sim::{Angle, Circuit, Gate};
use forge_core::synthesis::HeisenbergDecomposition;
use forge_core::{BitString, Letter, PauliString};
use num_complex::Complex64;
use rand::seq::index::sample;
use rand::Rng;

pub const LETTERS: [Letter; 4] = [Letter::I, Letter::X, Letter::Y, Letter::Z];

pub fn all_paulis(n: usize) -> Vec<PauliString> {
    (0..4usize.pow(n as u32))
        .map(|mut k| {
            let mut p = PauliString::identity(n);
            for q in 0..n {
                p.set(q, LETTERS[k % 4]);
                k /= 4;
            }
            p
        })
        .collect()
}

pub fn random_pauli<R: Rng>(rng: &mut R, n: usize) -> PauliString {
    let mut p = PauliString::identity(n);
    for q in 0..n {
        p.set(q, LETTERS[rng.random_range(0..4)]);
    }
    p.with_sign(rng.random_bool(0.5))
}

pub fn random_non_identity<R: Rng>(rng: &mut R, n: usize) -> PauliString {
    loop {
        let p = random_pauli(rng, n);
        if !p.is_identity() {
            return p;
        }
    }
}

/// Real particle-number-conserving circuit mixed with RY and CNOT layers.
pub fn random_real_circuit<R: Rng>(rng: &mut R, n: usize, depth: usize) -> Circuit {
    let mut c = Circuit::new(n);
    for _ in 0..depth {
        let a = rng.random_range(0..n);
        let theta = rng.random_range(-3.0..3.0);
        let gate = if n == 1 {
            Gate::Ry(a, Angle::Fixed(theta))
        } else {
            let mut b = rng.random_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            match rng.random_range(0..4) {
                0 => Gate::Hop(a, b, Angle::Fixed(theta)),
                1 => Gate::Cz(a, b),
                2 => Gate::Cnot(a, b),
                _ => Gate::Ry(a, Angle::Fixed(theta)),
            }
        };
        c.push(gate).unwrap();
    }
    c
}

pub fn random_lambdas<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.random_range(-1.0..1.0)).collect();
    let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
    raw.iter().map(|v| v / norm).collect()
}

pub fn random_bitstrings<R: Rng>(rng: &mut R, n: usize, k: usize) -> Vec<BitString> {
    sample(rng, 1 << n, k)
        .into_iter()
        .map(|v| BitString::new(n, v as u64).unwrap())
        .collect()
}

/// Operator `A ⊗ B` with `A` on the low register.
pub fn bipartite(a: &CMatrix, b: &CMatrix) -> CMatrix {
    dense::kron(b, a)
}

pub fn reconstruct(d: &HeisenbergDecomposition) -> CMatrix {
    let n = d.o1.len();
    let id = dense::identity(1 << n);
    let (m1, m2) = (dense::pauli_matrix(&d.o1), dense::pauli_matrix(&d.o2));
    let anti = &m1 * &m2 + &m2 * &m1;
    let mut total = (bipartite(&anti, &id) + bipartite(&id, &anti)) * Complex64::new(d.a0 / 2.0, 0.0);
    for t in &d.terms {
        let c = dense::circuit_unitary(&t.circuit.to_circuit());
        total += bipartite(&dense::conj(&c), &c) * Complex64::new(t.coeff, 0.0);
    }
    total
}

pub fn symmetrized_target(o1: &PauliString, o2: &PauliString) -> CMatrix {
    let (m1, m2) = (dense::pauli_matrix(o1), dense::pauli_matrix(o2));
    bipartite(&m1, &m2) + bipartite(&m2, &m1)
}
