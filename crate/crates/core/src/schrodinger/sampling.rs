use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{check_len, ForgeError, Result};
use crate::pauli::PauliString;
use crate::sim::{basis_rotation, Circuit, OutcomeSampler, Statevector};

use super::ansatz::SchmidtAnsatz;
use super::terms::{enumerate_forged_terms, one_norm_exact, one_norm_closed_form};

/// Number of sampled pairs handled by one deterministic RNG stream.
const CHUNK: u64 = 1 << 14;

/// Shot budget for an `ε`-accurate estimate at 99% confidence.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBudget {
    /// `Σ|μ_a|` from term enumeration.
    pub one_norm: f64,
    /// The closed form `1 + 4‖λ‖₁²`.
    pub one_norm_closed_form: f64,
    pub epsilon: f64,
    /// Experiments `S = ceil(200 ‖μ‖₁² / ε²)`.
    pub shots: u64,
    /// Same formula with the closed-form one-norm.
    pub shots_closed_form: u64,
    /// Sampling weights `π_a = |μ_a| / ‖μ‖₁`, in term order.
    pub pi: Vec<f64>,
}

impl SampleBudget {
    /// Pairs of experiments, `M = ceil(S / 2)`.
    pub fn pairs(&self) -> u64 {
        self.shots.div_ceil(2)
    }
}

/// `ceil(200 a² / ε²)`, tolerant to round-off just above an integer.
pub fn experiments_for(one_norm: f64, epsilon: f64) -> u64 {
    let s = 200.0 * one_norm * one_norm / (epsilon * epsilon);
    let r = s.round();
    if (s - r).abs() <= 1e-9 * r.max(1.0) {
        r as u64
    } else {
        s.ceil() as u64
    }
}

pub fn sampling_budget(ansatz: &SchmidtAnsatz, epsilon: f64) -> Result<SampleBudget> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(ForgeError::Input(format!("epsilon must be positive, got {epsilon}")));
    }
    let terms = enumerate_forged_terms(ansatz);
    let one_norm = one_norm_exact(ansatz);
    let closed = one_norm_closed_form(ansatz);
    Ok(SampleBudget {
        one_norm,
        one_norm_closed_form: closed,
        epsilon,
        shots: experiments_for(one_norm, epsilon),
        shots_closed_form: experiments_for(closed, epsilon),
        pi: terms.iter().map(|t| t.mu.abs() / one_norm).collect(),
    })
}

/// Result of the Monte Carlo estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampledEstimate {
    pub value: f64,
    pub stderr: f64,
    pub pairs: u64,
}

/// Outcome samplers for `V_i U ρ_a` on each register, built once.
struct TermSamplers {
    sign: Vec<f64>,
    first: Vec<OutcomeSampler>,
    second: Vec<OutcomeSampler>,
    pick: WeightedIndex<f64>,
}

impl TermSamplers {
    fn build(ansatz: &SchmidtAnsatz, o1: &PauliString, o2: &PauliString) -> Result<Self> {
        let terms: Vec<_> = enumerate_forged_terms(ansatz)
            .into_iter()
            .filter(|t| t.mu != 0.0)
            .collect();
        let rot1 = ansatz.u().clone().then(&basis_rotation(o1))?;
        let rot2 = ansatz.v().clone().then(&basis_rotation(o2))?;
        let sampler = |prep: &Circuit, c: &Circuit| -> Result<OutcomeSampler> {
            let s = Statevector::zero(c.n_qubits()).evolved(&prep.clone().then(c)?)?;
            OutcomeSampler::from_state(&s)
        };
        let built: Vec<(OutcomeSampler, OutcomeSampler)> = terms
            .par_iter()
            .map(|t| {
                let prep = t.prep.circuit()?;
                Ok((sampler(&prep, &rot1)?, sampler(&prep, &rot2)?))
            })
            .collect::<Result<_>>()?;
        let (first, second) = built.into_iter().unzip();
        let pick = WeightedIndex::new(terms.iter().map(|t| t.mu.abs()))
            .map_err(|e| ForgeError::Input(format!("degenerate term weights: {e}")))?;
        Ok(Self {
            sign: terms.iter().map(|t| t.mu.signum()).collect(),
            first,
            second,
            pick,
        })
    }
}

/// Estimate `<ψ| O1 ⊗ O2 |ψ>` from `pairs` sampled term indices, each
/// followed by one measurement per register. The result depends only on
/// `seed`, not on the worker count.
pub fn estimate_sampled(
    ansatz: &SchmidtAnsatz,
    o1: &PauliString,
    o2: &PauliString,
    pairs: u64,
    seed: u64,
) -> Result<SampledEstimate> {
    check_len(ansatz.n(), o1.len())?;
    check_len(ansatz.n(), o2.len())?;
    if pairs == 0 {
        return Err(ForgeError::Input("need at least one sampled pair".into()));
    }
    let s = TermSamplers::build(ansatz, o1, o2)?;
    let chunks = pairs.div_ceil(CHUNK);
    let partial: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let count = CHUNK.min(pairs - c * CHUNK);
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for _ in 0..count {
                let a = s.pick.sample(&mut rng);
                let x = s.first[a].sample(&mut rng);
                let y = s.second[a].sample(&mut rng);
                let v = s.sign[a] * o1.parity_eigenvalue(x) * o2.parity_eigenvalue(y);
                sum += v;
                sum_sq += v * v;
            }
            (sum, sum_sq)
        })
        .collect();
    let (sum, sum_sq) = partial
        .iter()
        .fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    let norm = one_norm_exact(ansatz);
    let m = pairs as f64;
    let mean = sum / m;
    let var = if pairs > 1 {
        (sum_sq - m * mean * mean).max(0.0) / (m - 1.0)
    } else {
        0.0
    };
    Ok(SampledEstimate {
        value: norm * mean,
        stderr: norm * (var / m).sqrt(),
        pairs,
    })
}
