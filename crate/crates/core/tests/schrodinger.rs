mod common;

use common::{bipartite, random_bitstrings, random_lambdas, random_pauli, random_real_circuit};
use forge_core::dense::{self, CMatrix, CVector};
use forge_core::schrodinger::{
    ansatz_statevector, direct_expectation, enumerate_forged_terms, forged_expectation_exact,
    forged_expectation_product_exact, one_norm_exact, one_norm_closed_form, product_statevector,
    schmidt_spectrum, truncation_residual, SchmidtAnsatz,
};
use forge_core::sim::Statevector;
use forge_core::BitString;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn projector(s: &Statevector) -> CMatrix {
    let v = CVector::from_vec(s.amplitudes().to_vec());
    dense::outer(&v, &v)
}

fn random_ansatz(rng: &mut ChaCha8Rng, n: usize, k: usize, separate_v: bool) -> SchmidtAnsatz {
    let depth = 3 * n;
    let u = random_real_circuit(rng, n, depth);
    let v = separate_v.then(|| random_real_circuit(rng, n, depth));
    SchmidtAnsatz::new(n, random_bitstrings(rng, n, k), random_lambdas(rng, k), u, v).unwrap()
}

#[test]
fn forged_matches_direct_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut cases = 0;
    for n in 2..=5 {
        for _ in 0..60 {
            let k = if rng.random_bool(0.3) { 1 << n } else { rng.random_range(1..=(1 << n).min(8)) };
            let separate = rng.random_bool(0.5);
            let a = random_ansatz(&mut rng, n, k, separate);
            let (o1, o2) = (random_pauli(&mut rng, n), random_pauli(&mut rng, n));
            let forged = forged_expectation_exact(&a, &o1, &o2).unwrap();
            let direct = direct_expectation(&a, &o1, &o2).unwrap();
            assert!((forged - direct).abs() <= 1e-10, "n={n} k={k} {o1} {o2}: {forged} vs {direct}");
            cases += 1;
        }
    }
    assert!(cases >= 200);
}

#[test]
fn product_route_matches_superposition_route() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for n in 1..=3 {
        for _ in 0..20 {
            let k = rng.random_range(1..=(1 << n));
            let a = random_ansatz(&mut rng, n, k, true);
            let (o1, o2) = (random_pauli(&mut rng, n), random_pauli(&mut rng, n));
            let exact = forged_expectation_exact(&a, &o1, &o2).unwrap();
            let (value, amp) = forged_expectation_product_exact(&a, &o1, &o2).unwrap();
            assert!((exact - value).abs() <= 1e-10);
            assert!(amp >= 1.0);
        }
    }
}

#[test]
fn density_operator_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 1..=3 {
        for _ in 0..4 {
            let k = rng.random_range(1..=(1 << n));
            let a = random_ansatz(&mut rng, n, k, true);
            let target = projector(&ansatz_statevector(&a).unwrap());
            let dim = 1 << (2 * n);
            let mut sum = CMatrix::zeros(dim, dim);
            for t in enumerate_forged_terms(&a) {
                let prep = t.prep.circuit().unwrap();
                let s1 = Statevector::zero(n).evolved(&prep.clone().then(a.u()).unwrap()).unwrap();
                let s2 = Statevector::zero(n).evolved(&prep.then(a.v()).unwrap()).unwrap();
                sum += bipartite(&projector(&s1), &projector(&s2)) * Complex64::new(t.mu, 0.0);
            }
            assert!(dense::max_abs_diff(&sum, &target) <= 1e-10);
        }
    }
}

#[test]
fn product_state_identity_all_pairs() {
    for n in 1..=3usize {
        for xv in 0..(1u64 << n) {
            for yv in 0..(1u64 << n) {
                if xv == yv {
                    continue;
                }
                let (x, y) = (BitString::new(n, xv).unwrap(), BitString::new(n, yv).unwrap());
                let d = x.hamming_distance(&y);
                let dim = 1 << n;
                let xy = dense::outer(&dense::basis_vector(dim, x.index()), &dense::basis_vector(dim, y.index()));
                let yx = xy.adjoint();
                let target = bipartite(&xy, &xy) + bipartite(&yx, &yx);
                let mut sum = CMatrix::zeros(dim * dim, dim * dim);
                for p in 0..4 * d {
                    let pr = projector(&product_statevector(&x, &y, p).unwrap());
                    let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
                    sum += bipartite(&pr, &pr) * Complex64::new(sign, 0.0);
                }
                sum *= Complex64::new(4f64.powi(d as i32) / (4.0 * d as f64), 0.0);
                assert!(dense::max_abs_diff(&sum, &target) <= 1e-10, "{x} {y}");
            }
        }
    }
}

#[test]
fn spectrum_matches_eigen_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for n in 1..=3 {
        let amps: Vec<Complex64> = (0..1 << (2 * n))
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let s = Statevector::normalized(amps).unwrap();
        let spectrum = schmidt_spectrum(&s).unwrap();
        let m = s.bipartite_matrix(n);
        let gram = &m * m.adjoint();
        let mut eig: Vec<f64> = gram
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .map(|v| v.max(0.0).sqrt())
            .collect();
        eig.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in spectrum.iter().zip(&eig) {
            assert!((a - b).abs() < 1e-10);
        }
        assert!((spectrum.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-10);
        assert!(truncation_residual(&spectrum, spectrum.len()) < 1e-12);
    }
}

#[test]
fn forged_spectrum_recovers_lambdas() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let a = random_ansatz(&mut rng, 3, 5, true);
    let spectrum = schmidt_spectrum(&ansatz_statevector(&a).unwrap()).unwrap();
    let mut abs: Vec<f64> = a.lambdas().iter().map(|l| l.abs()).collect();
    abs.sort_by(|x, y| y.total_cmp(x));
    for (s, l) in spectrum.iter().zip(&abs) {
        assert!((s - l).abs() < 1e-10);
    }
}

proptest! {
    #[test]
    fn one_norm_exact_never_exceeds_closed_form(raw in proptest::collection::vec(-1.0f64..1.0, 1..12)) {
        let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-3);
        let lambdas: Vec<f64> = raw.iter().map(|v| v / norm).collect();
        let k = lambdas.len();
        let bits = (0..k as u64).map(|v| BitString::new(4, v).unwrap()).collect();
        let a = SchmidtAnsatz::without_circuits(4, bits, lambdas).unwrap();
        let exact = one_norm_exact(&a);
        let l1 = a.lambda_one_norm();
        prop_assert!((exact - (2.0 * l1 * l1 - 1.0)).abs() < 1e-9);
        prop_assert!(exact <= one_norm_closed_form(&a));
    }

    #[test]
    fn residual_is_non_increasing(raw in proptest::collection::vec(0.0f64..1.0, 1..20)) {
        let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-3);
        let mut lambdas: Vec<f64> = raw.iter().map(|v| v / norm).collect();
        lambdas.sort_by(|a, b| b.total_cmp(a));
        let res: Vec<f64> = (0..=lambdas.len()).map(|k| truncation_residual(&lambdas, k)).collect();
        prop_assert!(res.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        prop_assert!(res[lambdas.len()] <= 1e-12);
    }
}
