use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::BitString;
use crate::error::{ForgeError, Result};
use crate::pauli::{Letter, PauliString};

use super::circuit::Circuit;
use super::gate::Gate;
use super::statevector::Statevector;

/// Measurement histogram keyed by basis index.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Counts {
    n_qubits: usize,
    counts: BTreeMap<usize, u64>,
}

impl Counts {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            counts: BTreeMap::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn record(&mut self, outcome: usize) {
        self.add(outcome, 1);
    }

    pub fn add(&mut self, outcome: usize, count: u64) {
        *self.counts.entry(outcome).or_insert(0) += count;
    }

    pub fn get(&self, outcome: usize) -> u64 {
        self.counts.get(&outcome).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts.iter().map(|(&k, &v)| (k, v))
    }

    pub fn bitstrings(&self) -> impl Iterator<Item = (BitString, u64)> + '_ {
        self.iter().map(move |(k, v)| {
            (
                BitString::new(self.n_qubits, k as u64).expect("outcome fits register"),
                v,
            )
        })
    }

    pub fn merge(&mut self, other: &Counts) {
        for (k, v) in other.iter() {
            self.add(k, v);
        }
    }

    /// Mean parity eigenvalue of a Z-diagonal string.
    pub fn parity_mean(&self, p: &PauliString) -> f64 {
        let total = self.total();
        if total == 0 {
            return 0.0;
        }
        let sum: f64 = self
            .iter()
            .map(|(k, v)| p.parity_eigenvalue(k) * v as f64)
            .sum();
        sum / total as f64
    }

    /// Marginal counts over `width` qubits starting at `offset`.
    pub fn marginal(&self, offset: usize, width: usize) -> Counts {
        let mask = (1usize << width) - 1;
        let mut out = Counts::new(width);
        for (k, v) in self.iter() {
            out.add((k >> offset) & mask, v);
        }
        out
    }
}

/// Repeated sampling from a fixed outcome distribution.
#[derive(Debug, Clone)]
pub struct OutcomeSampler {
    dist: WeightedIndex<f64>,
}

impl OutcomeSampler {
    pub fn new(probabilities: &[f64]) -> Result<Self> {
        let dist = WeightedIndex::new(probabilities.iter().map(|p| p.max(0.0)))
            .map_err(|e| ForgeError::Input(format!("invalid outcome distribution: {e}")))?;
        Ok(Self { dist })
    }

    pub fn from_state(state: &Statevector) -> Result<Self> {
        OutcomeSampler::new(&state.probabilities())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.dist.sample(rng)
    }
}

/// Sample `shots` Z-basis measurements of every qubit.
pub fn measure_samples(state: &Statevector, shots: u64, seed: u64) -> Result<Counts> {
    if shots == 0 {
        return Err(ForgeError::Input("shots must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    measure_with_rng(state, shots, &mut rng)
}

pub(crate) fn measure_with_rng<R: Rng + ?Sized>(
    state: &Statevector,
    shots: u64,
    rng: &mut R,
) -> Result<Counts> {
    let sampler = OutcomeSampler::from_state(state)?;
    let mut counts = Counts::new(state.n_qubits());
    for _ in 0..shots {
        counts.record(sampler.sample(rng));
    }
    Ok(counts)
}

/// Single-qubit rotations taking the eigenbasis of `p` to the Z basis:
/// `H` for X letters, `S†` then `H` for Y letters.
pub fn basis_rotation(p: &PauliString) -> Circuit {
    let mut c = Circuit::new(p.len());
    for q in 0..p.len() {
        match p.letter(q) {
            Letter::X => c.push(Gate::H(q)).expect("in range"),
            Letter::Y => {
                c.push(Gate::Sdg(q)).expect("in range");
                c.push(Gate::H(q)).expect("in range");
            }
            _ => {}
        }
    }
    c
}
