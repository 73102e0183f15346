//! Heisenberg-picture forging for `(U ⊗ U) Σ_x λ_x |x> ⊗ |x>` with real `U`.
//!
//! Each `C_j*⊗C_j` term becomes the mean of the ratio `R(x,y) = λ_y/λ_x`
//! with `x ~ λ²` and `y` measured on `U† C_j U |x>`.

use std::collections::HashMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::BitString;
use crate::clifford::CliffordCircuit;
use crate::error::{check_len, ForgeError, Result};
use crate::pauli::PauliString;
use crate::schrodinger::{check_lambdas, SchmidtAnsatz};
use crate::sim::{basis_rotation, Circuit, OutcomeSampler, Statevector};
use crate::synthesis::{heisenberg_decompose, HeisenbergForm};

/// Access to the coefficients `λ_x`: sampling `x ~ λ_x²` and ratios.
pub trait LambdaModel: Sync {
    fn n(&self) -> usize;
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize;
    /// `λ_y / λ_x`, or `None` when `λ_x = 0`.
    fn ratio(&self, x: usize, y: usize) -> Option<f64>;
}

/// All `2^n` coefficients held in memory.
#[derive(Debug, Clone)]
pub struct ExplicitLambda {
    n: usize,
    lambdas: Vec<f64>,
    dist: WeightedIndex<f64>,
}

impl ExplicitLambda {
    pub fn new(n: usize, lambdas: Vec<f64>) -> Result<Self> {
        check_len(1 << n, lambdas.len())?;
        check_lambdas(&lambdas)?;
        let dist = WeightedIndex::new(lambdas.iter().map(|l| l * l))
            .map_err(|e| ForgeError::Input(format!("invalid coefficient weights: {e}")))?;
        Ok(Self { n, lambdas, dist })
    }

    /// Coefficients given on a subset of bitstrings; the rest are zero.
    pub fn from_pairs(n: usize, bitstrings: &[BitString], lambdas: &[f64]) -> Result<Self> {
        check_len(bitstrings.len(), lambdas.len())?;
        let mut all = vec![0.0; 1 << n];
        for (b, l) in bitstrings.iter().zip(lambdas) {
            check_len(n, b.len())?;
            all[b.index()] = *l;
        }
        ExplicitLambda::new(n, all)
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }
}

impl LambdaModel for ExplicitLambda {
    fn n(&self) -> usize {
        self.n
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.dist.sample(rng)
    }

    fn ratio(&self, x: usize, y: usize) -> Option<f64> {
        let lx = self.lambdas[x];
        (lx != 0.0).then(|| self.lambdas[y] / lx)
    }
}

/// Circuit preparing `U† C U |x>`: X gates for `x`, then `U`, then `C`,
/// then `U` reversed with every gate inverted.
pub fn conditional_prep_circuit(u: &Circuit, c: &CliffordCircuit, x: &BitString) -> Result<Circuit> {
    check_len(u.n_qubits(), c.n_qubits())?;
    check_len(u.n_qubits(), x.len())?;
    crate::schrodinger::basis_prep_circuit(x)
        .then(u)?
        .then(&c.to_circuit())?
        .then(&u.inverse())
}

/// Columns `U|x>` for every basis state, rejecting complex `U`.
fn real_columns(u: &Circuit) -> Result<Vec<Statevector>> {
    let n = u.n_qubits();
    let cols: Vec<Statevector> = (0..1usize << n)
        .map(|x| Statevector::basis(n, x).evolved(u))
        .collect::<Result<_>>()?;
    if let Some(bad) = cols
        .iter()
        .flat_map(|c| c.amplitudes())
        .find(|a| a.im.abs() > 1e-10)
    {
        return Err(ForgeError::ContractViolation(format!(
            "U has a complex matrix element {bad}"
        )));
    }
    Ok(cols)
}

fn single_register(o1: &PauliString, o2: &PauliString) -> Option<PauliString> {
    if o2.is_identity() {
        Some(if o2.is_negative() { o1.negated() } else { *o1 })
    } else if o1.is_identity() {
        Some(if o1.is_negative() { o2.negated() } else { *o2 })
    } else {
        None
    }
}

/// Exact `<ψ| O1 ⊗ O2 |ψ>` by dense enumeration of every `μ_j`.
pub fn heisenberg_expectation_exact(
    u: &Circuit,
    lm: &ExplicitLambda,
    o1: &PauliString,
    o2: &PauliString,
) -> Result<f64> {
    let n = lm.n();
    check_len(n, u.n_qubits())?;
    check_len(n, o1.len())?;
    check_len(n, o2.len())?;
    let cols = real_columns(u)?;
    let lam = lm.lambdas();
    let weighted_diag = |p: &PauliString| -> Result<f64> {
        let mut total = 0.0;
        for (x, col) in cols.iter().enumerate() {
            if lam[x] != 0.0 {
                total += lam[x] * lam[x] * col.pauli_expectation(p)?;
            }
        }
        Ok(total)
    };
    if let Some(p) = single_register(o1, o2) {
        return weighted_diag(&p);
    }
    let d = match heisenberg_decompose(o1, o2)? {
        HeisenbergForm::Vanishing => return Ok(0.0),
        HeisenbergForm::Terms(d) => d,
    };
    let mut mu = 0.0;
    if d.a0 != 0.0 {
        let prod = d.product().expect("a0 terms come from commuting pairs");
        mu += d.a0 * weighted_diag(&prod)?;
    }
    for t in d.terms.iter().filter(|t| t.coeff != 0.0) {
        let mut mu_j = 0.0;
        for (x, &lx) in lam.iter().enumerate() {
            if lx == 0.0 {
                continue;
            }
            let xb = BitString::new(n, x as u64)?;
            let state = Statevector::zero(n).evolved(&conditional_prep_circuit(u, &t.circuit, &xb)?)?;
            let probs = state.probabilities();
            mu_j += lx * probs.iter().zip(lam).map(|(p, ly)| p * ly).sum::<f64>();
        }
        mu += 0.5 * t.coeff * mu_j;
    }
    Ok(mu)
}

/// Exact evaluation for an ansatz with `V = U`.
pub fn heisenberg_expectation_for_ansatz(a: &SchmidtAnsatz, o1: &PauliString, o2: &PauliString) -> Result<f64> {
    if !a.same_as_u() {
        return Err(ForgeError::ContractViolation(
            "Heisenberg forging needs a swap-invariant ansatz (V = U)".into(),
        ));
    }
    let lm = ExplicitLambda::from_pairs(a.n(), a.bitstrings(), a.lambdas())?;
    heisenberg_expectation_exact(a.u(), &lm, o1, o2)
}

/// Samples per estimated quantity for target precision `ε`: `κ/(ε/4)²` for
/// each `μ_j` and `κ/(ε/2)²` for the anticommutator term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeisenbergBudget {
    pub per_term: u64,
    pub anticommutator: u64,
}

impl HeisenbergBudget {
    pub fn for_epsilon(epsilon: f64, kappa: f64) -> Result<Self> {
        if !(epsilon > 0.0 && kappa > 0.0) {
            return Err(ForgeError::Input("epsilon and kappa must be positive".into()));
        }
        Ok(Self {
            per_term: (kappa * 16.0 / (epsilon * epsilon)).ceil() as u64,
            anticommutator: (kappa * 4.0 / (epsilon * epsilon)).ceil() as u64,
        })
    }

    pub fn uniform(samples: u64) -> Self {
        Self {
            per_term: samples,
            anticommutator: samples,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeisenbergEstimate {
    pub value: f64,
    pub stderr: f64,
    /// Draws discarded because `λ_x` was zero.
    pub skipped: u64,
    /// Total N-qubit experiments performed.
    pub experiments: u64,
}

struct MeanAcc {
    sum: f64,
    sum_sq: f64,
    count: u64,
}

impl MeanAcc {
    fn new() -> Self {
        Self { sum: 0.0, sum_sq: 0.0, count: 0 }
    }

    fn push(&mut self, v: f64) {
        self.sum += v;
        self.sum_sq += v * v;
        self.count += 1;
    }

    fn mean(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.sum / self.count as f64
        }
    }

    /// Variance of the mean.
    fn mean_variance(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let m = self.count as f64;
        let var = (self.sum_sq - m * self.mean() * self.mean()).max(0.0) / (m - 1.0);
        var / m
    }
}

/// Per-`x` outcome samplers built on first use.
struct LazySamplers<'a> {
    build: Box<dyn Fn(usize) -> Result<OutcomeSampler> + 'a>,
    cache: HashMap<usize, OutcomeSampler>,
}

impl<'a> LazySamplers<'a> {
    fn new(build: impl Fn(usize) -> Result<OutcomeSampler> + 'a) -> Self {
        Self {
            build: Box::new(build),
            cache: HashMap::new(),
        }
    }

    fn sample<R: Rng + ?Sized>(&mut self, x: usize, rng: &mut R) -> Result<usize> {
        if !self.cache.contains_key(&x) {
            let s = (self.build)(x)?;
            self.cache.insert(x, s);
        }
        Ok(self.cache[&x].sample(rng))
    }
}

/// Mean eigenvalue of `p` on `U|x>` with `x ~ λ²`.
fn sample_diagonal<L: LambdaModel, R: Rng>(
    u: &Circuit,
    lm: &L,
    p: &PauliString,
    samples: u64,
    rng: &mut R,
) -> Result<MeanAcc> {
    let n = lm.n();
    let rotated = u.clone().then(&basis_rotation(p))?;
    let mut samplers = LazySamplers::new(|x| {
        let s = Statevector::basis(n, x).evolved(&rotated)?;
        OutcomeSampler::from_state(&s)
    });
    let mut acc = MeanAcc::new();
    for _ in 0..samples {
        let x = lm.sample(rng);
        let outcome = samplers.sample(x, rng)?;
        acc.push(p.parity_eigenvalue(outcome));
    }
    Ok(acc)
}

/// Sampled estimate of `<ψ| O1 ⊗ O2 |ψ>`.
pub fn heisenberg_estimate_sampled<L: LambdaModel>(
    u: &Circuit,
    lm: &L,
    o1: &PauliString,
    o2: &PauliString,
    budget: HeisenbergBudget,
    seed: u64,
) -> Result<HeisenbergEstimate> {
    let n = lm.n();
    check_len(n, u.n_qubits())?;
    check_len(n, o1.len())?;
    check_len(n, o2.len())?;
    if budget.per_term == 0 || budget.anticommutator == 0 {
        return Err(ForgeError::Input("sample counts must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if let Some(p) = single_register(o1, o2) {
        let acc = sample_diagonal(u, lm, &p, budget.per_term, &mut rng)?;
        return Ok(HeisenbergEstimate {
            value: acc.mean(),
            stderr: acc.mean_variance().sqrt(),
            skipped: 0,
            experiments: acc.count,
        });
    }
    let d = match heisenberg_decompose(o1, o2)? {
        HeisenbergForm::Vanishing => {
            return Ok(HeisenbergEstimate {
                value: 0.0,
                stderr: 0.0,
                skipped: 0,
                experiments: 0,
            })
        }
        HeisenbergForm::Terms(d) => d,
    };
    let (mut value, mut variance, mut skipped, mut experiments) = (0.0, 0.0, 0u64, 0u64);
    if d.a0 != 0.0 {
        let prod = d.product().expect("a0 terms come from commuting pairs");
        let acc = sample_diagonal(u, lm, &prod, budget.anticommutator, &mut rng)?;
        value += d.a0 * acc.mean();
        variance += d.a0 * d.a0 * acc.mean_variance();
        experiments += acc.count;
    }
    for t in d.terms.iter().filter(|t| t.coeff != 0.0) {
        let acc = sample_ratio(u, lm, &t.circuit, budget.per_term, &mut rng, &mut skipped)?;
        value += 0.5 * t.coeff * acc.mean();
        variance += 0.25 * t.coeff * t.coeff * acc.mean_variance();
        experiments += acc.count;
    }
    Ok(HeisenbergEstimate {
        value,
        stderr: variance.sqrt(),
        skipped,
        experiments,
    })
}

fn sample_ratio<L: LambdaModel, R: Rng>(
    u: &Circuit,
    lm: &L,
    c: &CliffordCircuit,
    samples: u64,
    rng: &mut R,
    skipped: &mut u64,
) -> Result<MeanAcc> {
    let n = lm.n();
    let mut samplers = LazySamplers::new(|x| {
        let xb = BitString::new(n, x as u64)?;
        let s = Statevector::zero(n).evolved(&conditional_prep_circuit(u, c, &xb)?)?;
        OutcomeSampler::from_state(&s)
    });
    let mut acc = MeanAcc::new();
    for _ in 0..samples {
        let x = lm.sample(rng);
        let y = samplers.sample(x, rng)?;
        match lm.ratio(x, y) {
            Some(r) => acc.push(r),
            None => *skipped += 1,
        }
    }
    Ok(acc)
}

/// Draw `samples` ratios `R(x,y)` for one Clifford term, returning them raw
/// (used to check `E[R²] = 1`).
pub fn sample_ratios<L: LambdaModel>(
    u: &Circuit,
    lm: &L,
    c: &CliffordCircuit,
    samples: u64,
    seed: u64,
) -> Result<Vec<f64>> {
    let n = lm.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samplers = LazySamplers::new(|x| {
        let xb = BitString::new(n, x as u64)?;
        let s = Statevector::zero(n).evolved(&conditional_prep_circuit(u, c, &xb)?)?;
        OutcomeSampler::from_state(&s)
    });
    let mut out = Vec::with_capacity(samples as usize);
    for _ in 0..samples {
        let x = lm.sample(&mut rng);
        let y = samplers.sample(x, &mut rng)?;
        if let Some(r) = lm.ratio(x, y) {
            out.push(r);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::CliffordGate;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn bell() -> ExplicitLambda {
        ExplicitLambda::new(1, vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap()
    }

    #[test]
    fn bell_examples() {
        let u = Circuit::new(1);
        let zz = heisenberg_expectation_exact(&u, &bell(), &p("Z"), &p("Z")).unwrap();
        assert!((zz - 1.0).abs() < 1e-12);
        let xz = heisenberg_expectation_exact(&u, &bell(), &p("X"), &p("Z")).unwrap();
        assert!(xz.abs() < 1e-12);
        let xx = heisenberg_expectation_exact(&u, &bell(), &p("X"), &p("X")).unwrap();
        assert!((xx - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_complex_u() {
        let u = Circuit::parse(1, "H 0\nS 0").unwrap();
        assert!(matches!(
            heisenberg_expectation_exact(&u, &bell(), &p("Z"), &p("Z")),
            Err(ForgeError::ContractViolation(_))
        ));
        // S followed by S is Z: real even though S is not.
        let u = Circuit::parse(1, "S 0\nS 0").unwrap();
        assert!(heisenberg_expectation_exact(&u, &bell(), &p("Z"), &p("Z")).is_ok());
    }

    #[test]
    fn conditional_prep_examples() {
        let u = Circuit::new(2);
        let c = CliffordCircuit::new(2);
        let x = BitString::zeros(2);
        assert!(conditional_prep_circuit(&u, &c, &x).unwrap().is_empty());

        let u = Circuit::parse(1, "H 0").unwrap();
        let c = CliffordCircuit::from_gates(1, vec![CliffordGate::Z(0)]).unwrap();
        let circ = conditional_prep_circuit(&u, &c, &BitString::zeros(1)).unwrap();
        let s = Statevector::zero(1).evolved(&circ).unwrap();
        assert!((s.probabilities()[1] - 1.0).abs() < 1e-12);

        let u = Circuit::parse(3, "HOP 0 1 0.2\nRY 2 0.1").unwrap();
        let c = CliffordCircuit::from_gates(3, vec![CliffordGate::H(1)]).unwrap();
        let x: BitString = "101".parse().unwrap();
        assert_eq!(conditional_prep_circuit(&u, &c, &x).unwrap().len(), 2 + 2 * 2 + 1);
    }

    #[test]
    fn single_bitstring_is_exact() {
        let lm = ExplicitLambda::from_pairs(2, &["10".parse().unwrap()], &[1.0]).unwrap();
        let u = Circuit::new(2);
        let est = heisenberg_estimate_sampled(&u, &lm, &p("ZI"), &p("IZ"), HeisenbergBudget::uniform(50), 1)
            .unwrap();
        let exact = heisenberg_expectation_exact(&u, &lm, &p("ZI"), &p("IZ")).unwrap();
        assert!((est.value - exact).abs() < 1e-12);
        assert_eq!(est.stderr, 0.0);
    }

    #[test]
    fn vanishing_pairs_skip_evaluation() {
        let u = Circuit::new(2);
        let lm = ExplicitLambda::new(2, vec![0.5; 4]).unwrap();
        let est = heisenberg_estimate_sampled(&u, &lm, &p("YI"), &p("XZ"), HeisenbergBudget::uniform(10), 0)
            .unwrap();
        assert_eq!(est.value, 0.0);
        assert_eq!(est.experiments, 0);
    }
}
