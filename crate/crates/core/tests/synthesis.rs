mod common;

use common::{all_paulis, random_non_identity, reconstruct, symmetrized_target};
use forge_core::dense;
use forge_core::synthesis::{
    heisenberg_decompose, synthesize_anticommuting, synthesize_commuting, HeisenbergForm,
};
use forge_core::{Letter, PauliString};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn check_anticommuting(o1: &PauliString, o2: &PauliString) {
    let n = o1.len();
    let (v, q) = synthesize_anticommuting(o1, o2).unwrap();
    assert_eq!(v.image(&PauliString::single(n, q, Letter::X)).unwrap(), *o1);
    assert_eq!(v.image(&PauliString::single(n, q, Letter::Z)).unwrap(), *o2);
    let bound = (o1.weight() + o2.weight() - 2) as usize;
    assert!(v.cnot_count() <= bound, "{o1},{o2}: {} > {bound}", v.cnot_count());
}

fn check_commuting(o1: &PauliString, o2: &PauliString) {
    let n = o1.len();
    let (v, p, q) = synthesize_commuting(o1, o2).unwrap();
    assert_ne!(p, q);
    assert_eq!(v.image(&PauliString::single(n, p, Letter::Z)).unwrap(), *o1);
    assert_eq!(v.image(&PauliString::single(n, q, Letter::Z)).unwrap(), *o2);
    let bound = (o1.weight() + o2.weight() - 2) as usize;
    assert!(v.cnot_count() <= bound, "{o1},{o2}: {} > {bound}", v.cnot_count());
}

fn signed_pairs(n: usize) -> Vec<(PauliString, PauliString)> {
    let ps: Vec<PauliString> = all_paulis(n).into_iter().filter(|p| !p.is_identity()).collect();
    let mut out = Vec::new();
    for a in &ps {
        for b in &ps {
            for (sa, sb) in [(false, false), (true, false), (false, true), (true, true)] {
                out.push((a.with_sign(sa), b.with_sign(sb)));
            }
        }
    }
    out
}

#[test]
fn synthesis_exhaustive_small_registers() {
    for n in [1, 2, 3] {
        for (a, b) in signed_pairs(n) {
            if !a.commutes(&b).unwrap() {
                check_anticommuting(&a, &b);
            } else if !a.same_letters(&b) {
                check_commuting(&a, &b);
            }
        }
    }
}

#[test]
fn synthesis_dense_conjugation_three_qubits() {
    for (a, b) in signed_pairs(3).into_iter().step_by(7) {
        if a.commutes(&b).unwrap() {
            continue;
        }
        let (v, q) = synthesize_anticommuting(&a, &b).unwrap();
        let u = dense::circuit_unitary(&v.to_circuit());
        let x = dense::pauli_matrix(&PauliString::single(3, q, Letter::X));
        let z = dense::pauli_matrix(&PauliString::single(3, q, Letter::Z));
        assert!(dense::max_abs_diff(&(&u * x * u.adjoint()), &dense::pauli_matrix(&a)) < 1e-12);
        assert!(dense::max_abs_diff(&(&u * z * u.adjoint()), &dense::pauli_matrix(&b)) < 1e-12);
    }
}

#[test]
fn synthesis_random_six_qubits() {
    let mut rng = ChaCha8Rng::seed_from_u64(60);
    let (mut anti, mut comm) = (0, 0);
    while anti < 500 || comm < 500 {
        let a = random_non_identity(&mut rng, 6);
        let b = random_non_identity(&mut rng, 6);
        if !a.commutes(&b).unwrap() {
            check_anticommuting(&a, &b);
            anti += 1;
        } else if !a.same_letters(&b) {
            check_commuting(&a, &b);
            comm += 1;
        }
    }
}

#[test]
fn heisenberg_reconstruction_up_to_three_qubits() {
    for n in [1, 2, 3] {
        let pairs = signed_pairs(n);
        let step = if n == 3 { 5 } else { 1 };
        for (a, b) in pairs.into_iter().step_by(step) {
            match heisenberg_decompose(&a, &b).unwrap() {
                HeisenbergForm::Vanishing => {
                    assert_ne!(a.y_count() % 2, b.y_count() % 2);
                }
                HeisenbergForm::Terms(d) => {
                    let diff = dense::max_abs_diff(&reconstruct(&d), &symmetrized_target(&a, &b));
                    assert!(diff <= 1e-10, "{a},{b}: {diff}");
                    let bound = 2 * (a.weight() + b.weight()) as usize;
                    assert!(d.max_cnot_count() <= bound);
                    assert!(d.terms.iter().all(|t| t.coeff.abs() <= 1.0));
                    for t in &d.terms {
                        let dim = 1 << n;
                        let mut sym = dense::CMatrix::zeros(dim, dim);
                        for (c, p) in &t.symbolic {
                            sym += dense::pauli_matrix(p) * Complex64::new(*c, 0.0);
                        }
                        let circ = dense::circuit_unitary(&t.circuit.to_circuit());
                        assert!(dense::max_abs_diff_up_to_phase(&sym, &circ) < 1e-10);
                    }
                }
            }
        }
    }
}

#[test]
fn conjugation_sign_identity() {
    for p in all_paulis(3) {
        let m = dense::pauli_matrix(&p);
        let scaled = &m * Complex64::new(p.conjugation_sign(), 0.0);
        assert!(dense::max_abs_diff(&dense::conj(&m), &scaled) < 1e-15);
    }
}
