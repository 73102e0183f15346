use std::collections::HashMap;
use std::fmt::Write as _;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{ForgeError, Result};
use crate::hamiltonian::Hamiltonian;
use crate::orchestration::{fold, group_basis, tpb_group, zne_extrapolate, ZneSchedule};
use crate::pauli::PauliString;
use crate::schrodinger::{enumerate_forged_terms, ForgedTerm, ProductTerm, SchmidtAnsatz};
use crate::sim::{basis_rotation, sample_noisy, Circuit, NoiseModel};

use super::config::AnsatzConfig;
use super::hmatrix::{assemble_h_matrix, exact_pieces, update_lambda, HMatrix, HPieces};
use super::spsa::{spsa_optimize, SpsaConfig};

/// Shot-based evaluation settings.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledOptions {
    /// Shots per measurement group per circuit (split across stretch
    /// factors when ZNE is on).
    pub shots: u64,
    pub noise: NoiseModel,
    pub zne: Option<ZneSchedule>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EvalMode {
    Exact,
    Sampled(SampledOptions),
}

/// Work done so far.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalCounters {
    pub evaluations: u64,
    /// N-qubit circuits prepared (exact) or executed (sampled, per stretch factor).
    pub circuits: u64,
    /// Times the first bitstring's diagonal circuit was run.
    pub first_diagonal: u64,
    pub shots: u64,
}

/// One energy evaluation with `λ` re-optimized for the current `θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub energy: f64,
    pub stderr: f64,
    pub lambdas: Vec<f64>,
    pub h: HMatrix,
    pub shots: u64,
}

/// A Hamiltonian with a hop-gate ansatz, ready for repeated evaluation.
#[derive(Debug, Clone)]
pub struct VqeProblem {
    ops: Vec<ProductTerm>,
    config: AnsatzConfig,
    mode: EvalMode,
    counters: EvalCounters,
}

/// `(value, variance)` per forged term; `None` when the term was skipped.
type TermEstimates = Vec<Option<(f64, f64)>>;

impl VqeProblem {
    pub fn new(ham: &Hamiltonian, config: AnsatzConfig, mode: EvalMode) -> Result<Self> {
        if ham.partition() != config.n() {
            return Err(ForgeError::LengthMismatch {
                expected: config.n(),
                found: ham.partition(),
            });
        }
        if let EvalMode::Sampled(o) = &mode {
            if o.shots == 0 {
                return Err(ForgeError::Input("sampled mode needs a positive shot budget".into()));
            }
        }
        Ok(Self {
            ops: ham.split_terms(),
            config,
            mode,
            counters: EvalCounters::default(),
        })
    }

    pub fn config(&self) -> &AnsatzConfig {
        &self.config
    }

    pub fn counters(&self) -> EvalCounters {
        self.counters
    }

    /// Ansatz with the circuit for `theta` and uniform placeholder `λ`.
    pub fn ansatz(&self, theta: &[f64]) -> Result<SchmidtAnsatz> {
        let k = self.config.k();
        let u = self.config.build_u(theta)?;
        SchmidtAnsatz::new(
            self.config.n(),
            self.config.bitstrings().to_vec(),
            vec![1.0 / (k as f64).sqrt(); k],
            u,
            None,
        )
    }

    fn frozen(&self) -> Option<f64> {
        if self.config.hf_freeze() {
            self.config.hf_energy()
        } else {
            None
        }
    }

    /// Evaluate the h-matrix at `theta` and take its lowest eigenpair.
    /// `seed` drives sampled mode only.
    pub fn evaluate(&mut self, theta: &[f64], seed: u64) -> Result<Evaluation> {
        let ansatz = self.ansatz(theta)?;
        let frozen = self.frozen();
        let (pieces, estimates, shots) = match &self.mode {
            EvalMode::Exact => {
                let (pieces, states) = exact_pieces(&ansatz, &self.ops, frozen)?;
                self.counters.circuits += states.prepared_count() as u64;
                let diag0 = states.terms().iter().position(|t| t.is_diagonal() && t.n == 0);
                if diag0.is_some_and(|i| states.is_prepared(i)) {
                    self.counters.first_diagonal += 1;
                }
                (pieces, None, 0)
            }
            EvalMode::Sampled(opts) => {
                let terms = enumerate_forged_terms(&ansatz);
                let run = sampled_terms(&ansatz, &terms, &self.ops, opts, frozen.is_some(), seed)?;
                self.counters.circuits += run.circuits;
                self.counters.first_diagonal += run.first_diagonal;
                let mut pieces = HPieces::new(ansatz.k());
                for (t, e) in terms.iter().zip(&run.estimates) {
                    match e {
                        Some((v, _)) if t.is_diagonal() => pieces.set_diagonal(t.n, *v),
                        Some((v, _)) => pieces.add_pair(t.n, t.m, t.weight * v),
                        None => {}
                    }
                }
                if let Some(e) = frozen {
                    pieces.set_diagonal(0, e);
                }
                (pieces, Some((terms, run.estimates)), run.shots)
            }
        };
        let h = assemble_h_matrix(&pieces)?;
        let (lambdas, energy) = update_lambda(&h);
        if !energy.is_finite() {
            return Err(ForgeError::NonFinite(format!("energy {energy}")));
        }
        let stderr = estimates.map_or(0.0, |(terms, est)| {
            terms
                .iter()
                .zip(&est)
                .filter_map(|(t, e)| e.map(|(_, var)| (t.weight * lambdas[t.n] * lambdas[t.m]).powi(2) * var))
                .sum::<f64>()
                .sqrt()
        });
        self.counters.evaluations += 1;
        self.counters.shots += shots;
        Ok(Evaluation {
            energy,
            stderr,
            lambdas,
            h,
            shots,
        })
    }
}

struct SampledRun {
    estimates: TermEstimates,
    circuits: u64,
    first_diagonal: u64,
    shots: u64,
}

/// Seed for experiment `(term, register, group)` of one evaluation.
fn experiment_seed(seed: u64, term: usize, register: usize, group: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((term as u64) << 24) | ((register as u64) << 20) | group as u64);
    rng.next_u64()
}

/// `(mean, variance of the mean)` per string, circuits run, shots used.
type RegisterEstimate = (Vec<(f64, f64)>, u64, u64);

/// Estimates `<P>` for every string in `paulis` on the state prepared by
/// `circuit`, grouping qubit-wise compatible strings. Returns means,
/// variances of the means, circuits run and shots used.
fn measure_register(
    circuit: &Circuit,
    paulis: &[PauliString],
    opts: &SampledOptions,
    seed_of: impl Fn(usize) -> u64,
) -> Result<RegisterEstimate> {
    let mut out = vec![(1.0, 0.0); paulis.len()];
    let measured: Vec<usize> = (0..paulis.len()).filter(|&i| !paulis[i].is_identity()).collect();
    let subset: Vec<PauliString> = measured.iter().map(|&i| paulis[i]).collect();
    let (mut circuits, mut shots) = (0, 0);
    for (g, members) in tpb_group(&subset)?.iter().enumerate() {
        let rotation = basis_rotation(&group_basis(&subset, members));
        let seed = seed_of(g);
        match &opts.zne {
            None => {
                let counts = sample_noisy(&circuit.clone().then(&rotation)?, &opts.noise, opts.shots, seed)?;
                circuits += 1;
                shots += opts.shots;
                for &j in members {
                    let m = counts.parity_mean(&subset[j]);
                    out[measured[j]] = (m, (1.0 - m * m).max(0.0) / opts.shots as f64);
                }
            }
            Some(schedule) => {
                let alloc = schedule.allocate_shots(opts.shots);
                let mut per_factor: Vec<Vec<f64>> = Vec::with_capacity(alloc.len());
                let mut variances = vec![0.0; members.len()];
                let x: Vec<f64> = schedule.factors().iter().map(|&f| f as f64).collect();
                // Weight of each point in the extrapolated intercept.
                let mean_x = x.iter().sum::<f64>() / x.len() as f64;
                let sxx: f64 = x.iter().map(|v| (v - mean_x).powi(2)).sum();
                for (fi, (&f, &s)) in schedule.factors().iter().zip(&alloc).enumerate() {
                    let c = fold(circuit, f)?.then(&rotation)?;
                    let counts = sample_noisy(&c, &opts.noise, s, seed.wrapping_add(fi as u64))?;
                    circuits += 1;
                    shots += s;
                    let w = 1.0 / x.len() as f64 - mean_x * (x[fi] - mean_x) / sxx;
                    let vals: Vec<f64> = members.iter().map(|&j| counts.parity_mean(&subset[j])).collect();
                    for (v, m) in variances.iter_mut().zip(&vals) {
                        *v += w * w * (1.0 - m * m).max(0.0) / s as f64;
                    }
                    per_factor.push(vals);
                }
                for (mi, &j) in members.iter().enumerate() {
                    let points: Vec<(f64, f64)> = x.iter().zip(&per_factor).map(|(&f, v)| (f, v[mi])).collect();
                    out[measured[j]] = (zne_extrapolate(&points)?, variances[mi]);
                }
            }
        }
    }
    Ok((out, circuits, shots))
}

fn sampled_terms(
    ansatz: &SchmidtAnsatz,
    terms: &[ForgedTerm],
    ops: &[ProductTerm],
    opts: &SampledOptions,
    skip_first_diagonal: bool,
    seed: u64,
) -> Result<SampledRun> {
    type TermEstimate = ((f64, f64), u64, u64);
    let per_term: Vec<Option<TermEstimate>> = terms
        .par_iter()
        .enumerate()
        .map(|(i, t)| -> Result<_> {
            if skip_first_diagonal && t.is_diagonal() && t.n == 0 {
                return Ok(None);
            }
            // Off-diagonal terms of products with an identity factor cancel over p.
            let used: Vec<&ProductTerm> = ops
                .iter()
                .filter(|(_, a, b)| t.is_diagonal() || !(a.is_identity() || b.is_identity()))
                .collect();
            let mut index: [HashMap<PauliString, usize>; 2] = [HashMap::new(), HashMap::new()];
            let mut lists: [Vec<PauliString>; 2] = [Vec::new(), Vec::new()];
            let keyed: Vec<(f64, usize, usize)> = used
                .iter()
                .map(|(c, a, b)| {
                    let mut slot = |r: usize, p: &PauliString| {
                        let key = p.unsigned();
                        *index[r].entry(key).or_insert_with(|| {
                            lists[r].push(key);
                            lists[r].len() - 1
                        })
                    };
                    let (ia, ib) = (slot(0, a), slot(1, b));
                    (c * a.sign() * b.sign(), ia, ib)
                })
                .collect();
            let circuit = t.prep.circuit()?.then(ansatz.u())?;
            let (r0, c0, s0) = measure_register(&circuit, &lists[0], opts, |g| experiment_seed(seed, i, 0, g))?;
            let (r1, c1, s1) = measure_register(&circuit, &lists[1], opts, |g| experiment_seed(seed, i, 1, g))?;
            let (mut value, mut var) = (0.0, 0.0);
            for &(c, ia, ib) in &keyed {
                let ((u, vu), (v, vv)) = (r0[ia], r1[ib]);
                value += c * u * v;
                var += c * c * (v * v * vu + u * u * vv + vu * vv);
            }
            Ok(Some(((value, var), c0 + c1, s0 + s1)))
        })
        .collect::<Result<_>>()?;
    let mut run = SampledRun {
        estimates: Vec::with_capacity(terms.len()),
        circuits: 0,
        first_diagonal: 0,
        shots: 0,
    };
    for (t, r) in terms.iter().zip(per_term) {
        match r {
            Some((est, c, s)) => {
                run.estimates.push(Some(est));
                run.circuits += c;
                run.shots += s;
                if t.is_diagonal() && t.n == 0 {
                    run.first_diagonal += 1;
                }
            }
            None => run.estimates.push(None),
        }
    }
    Ok(run)
}

/// One row of the optimization trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct VqeRecord {
    pub iteration: usize,
    pub energy: f64,
    pub stderr: f64,
    pub lambdas: Vec<f64>,
    pub theta: Vec<f64>,
    /// Shots consumed up to and including this iteration's evaluation.
    pub shots: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VqeTrajectory {
    pub records: Vec<VqeRecord>,
    /// Index of the lowest-energy record.
    pub best: Option<usize>,
    pub counters: EvalCounters,
    pub aborted: Option<ForgeError>,
}

impl VqeTrajectory {
    pub fn best_record(&self) -> Option<&VqeRecord> {
        self.best.map(|i| &self.records[i])
    }

    /// CSV with columns `iteration, energy, stderr, lambda_1..k, theta_1..m,
    /// shots`. Schmidt coefficients are written as absolute values.
    pub fn to_csv(&self) -> String {
        let k = self.records.first().map_or(0, |r| r.lambdas.len());
        let m = self.records.first().map_or(0, |r| r.theta.len());
        let mut out = String::from("iteration,energy,stderr");
        for i in 1..=k {
            write!(out, ",lambda_{i}").unwrap();
        }
        for i in 1..=m {
            write!(out, ",theta_{i}").unwrap();
        }
        out.push_str(",shots\n");
        for r in &self.records {
            write!(out, "{},{:?},{:?}", r.iteration, r.energy, r.stderr).unwrap();
            for l in &r.lambdas {
                write!(out, ",{:?}", l.abs()).unwrap();
            }
            for t in &r.theta {
                write!(out, ",{t:?}").unwrap();
            }
            writeln!(out, ",{}", r.shots).unwrap();
        }
        out
    }
}

/// Optimize `θ` with SPSA, re-solving for `λ` at every evaluation.
pub fn vqe_run(
    ham: &Hamiltonian,
    config: &AnsatzConfig,
    mode: EvalMode,
    spsa: &SpsaConfig,
    seed: u64,
) -> Result<VqeTrajectory> {
    let mut problem = VqeProblem::new(ham, config.clone(), mode)?;
    let mut seeds = ChaCha8Rng::seed_from_u64(seed);
    seeds.set_stream(1);
    let run = spsa_optimize(
        |theta| {
            let e = problem.evaluate(theta, seeds.next_u64())?;
            let shots = problem.counters().shots;
            Ok((e.energy, (e, shots)))
        },
        config.initial_params(),
        spsa,
        seed,
    )?;
    let records = run
        .steps
        .iter()
        .map(|s| VqeRecord {
            iteration: s.iteration,
            energy: s.value,
            stderr: s.info.0.stderr,
            lambdas: s.info.0.lambdas.clone(),
            theta: s.theta.clone(),
            shots: s.info.1,
        })
        .collect();
    Ok(VqeTrajectory {
        records,
        best: run.best,
        counters: problem.counters(),
        aborted: run.aborted,
    })
}
