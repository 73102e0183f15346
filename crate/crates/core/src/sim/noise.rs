use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{ForgeError, Result};
use crate::pauli::{Letter, PauliString};

use super::circuit::Circuit;
use super::measure::{Counts, OutcomeSampler};
use super::statevector::Statevector;

/// Stochastic Pauli noise: after every gate, with probability `p1` (one-qubit
/// gates) or `p2` (two-qubit gates) a uniformly random non-identity Pauli
/// acts on the gate's targets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub p1: f64,
    pub p2: f64,
}

impl NoiseModel {
    pub fn new(p1: f64, p2: f64) -> Result<Self> {
        for (name, p) in [("p1", p1), ("p2", p2)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(ForgeError::Input(format!(
                    "noise probability {name}={p} outside [0, 1]"
                )));
            }
        }
        Ok(Self { p1, p2 })
    }

    pub fn noiseless() -> Self {
        Self { p1: 0.0, p2: 0.0 }
    }

    pub fn is_noiseless(&self) -> bool {
        self.p1 == 0.0 && self.p2 == 0.0
    }
}

const LETTERS: [Letter; 4] = [Letter::I, Letter::X, Letter::Y, Letter::Z];

fn random_error<R: Rng + ?Sized>(n: usize, targets: &[usize], rng: &mut R) -> PauliString {
    let kinds = 4usize.pow(targets.len() as u32) - 1;
    let mut pick = rng.random_range(0..kinds) + 1;
    let mut p = PauliString::identity(n);
    for &q in targets {
        p.set(q, LETTERS[pick % 4]);
        pick /= 4;
    }
    p
}

/// Sample `shots` measurements of `prep` applied to `|0...0>` under `noise`.
/// With zero noise this consumes the generator exactly like `measure_samples`.
pub fn sample_noisy(prep: &Circuit, noise: &NoiseModel, shots: u64, seed: u64) -> Result<Counts> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = Counts::new(prep.n_qubits());
    for o in noisy_outcomes(prep, noise, shots, &mut rng)? {
        counts.record(o);
    }
    Ok(counts)
}

/// Per-shot outcomes in sampling order; [`sample_noisy`] tallies these.
pub(crate) fn noisy_outcomes<R: Rng + ?Sized>(
    prep: &Circuit,
    noise: &NoiseModel,
    shots: u64,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let noise = NoiseModel::new(noise.p1, noise.p2)?;
    if shots == 0 {
        return Err(ForgeError::Input("shots must be at least 1".into()));
    }
    let n = prep.n_qubits();
    let ideal = Statevector::zero(n).evolved(prep)?;
    let ideal_sampler = OutcomeSampler::from_state(&ideal)?;
    if noise.is_noiseless() {
        return Ok((0..shots).map(|_| ideal_sampler.sample(rng)).collect());
    }
    let rates: Vec<f64> = prep
        .gates()
        .iter()
        .map(|g| if g.is_two_qubit() { noise.p2 } else { noise.p1 })
        .collect();
    let mut outcomes = Vec::with_capacity(shots as usize);
    let mut faults: Vec<(usize, PauliString)> = Vec::new();
    for _ in 0..shots {
        faults.clear();
        for (i, (g, &p)) in prep.gates().iter().zip(&rates).enumerate() {
            if p > 0.0 && rng.random::<f64>() < p {
                faults.push((i, random_error(n, &g.targets(), rng)));
            }
        }
        if faults.is_empty() {
            outcomes.push(ideal_sampler.sample(rng));
            continue;
        }
        let mut state = Statevector::zero(n);
        let mut next = faults.iter().peekable();
        for (i, g) in prep.gates().iter().enumerate() {
            state.apply_gate(g)?;
            while let Some((_, err)) = next.next_if(|(at, _)| *at == i) {
                state.apply_pauli(err)?;
            }
        }
        outcomes.push(OutcomeSampler::from_state(&state)?.sample(rng));
    }
    Ok(outcomes)
}
