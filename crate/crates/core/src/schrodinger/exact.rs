use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{check_len, ForgeError, Result};
use crate::pauli::PauliString;
use crate::sim::{Circuit, Statevector};

use super::ansatz::SchmidtAnsatz;
use super::terms::{enumerate_forged_terms, enumerate_product_terms, ForgedTerm, TermPrep};

/// A weighted product observable `coeff · O1 ⊗ O2`.
pub type ProductTerm = (f64, PauliString, PauliString);

/// Which forged states get prepared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EvalOptions {
    /// Replace odd-p superposition states by the classical value
    /// `½(<x|Õ|x> + <y|Õ|y>)`, valid for real `U`, `V` and real observables.
    pub elide_odd_p: bool,
    /// Never prepare this diagonal state (its value must come from elsewhere).
    pub skip_diagonal: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Source {
    Prepared,
    Substituted,
    Skipped,
}

/// Forged states `U ρ_a` and `V ρ_a`, ready for repeated observable queries.
#[derive(Debug, Clone)]
pub struct ForgedStates {
    n: usize,
    terms: Vec<ForgedTerm>,
    sources: Vec<Source>,
    diagonal_of: Vec<Option<usize>>,
    u_states: Vec<Option<Statevector>>,
    v_states: Option<Vec<Option<Statevector>>>,
}

fn evolve(prep: &TermPrep, c: &Circuit) -> Result<Statevector> {
    Statevector::zero(c.n_qubits()).evolved(&prep.circuit()?.then(c)?)
}

impl ForgedStates {
    pub fn prepare(ansatz: &SchmidtAnsatz, terms: Vec<ForgedTerm>, opts: EvalOptions) -> Result<Self> {
        if opts.elide_odd_p && !ansatz.is_real() {
            return Err(ForgeError::ContractViolation(
                "odd-p elision needs real U and V".into(),
            ));
        }
        let mut diagonal_of = vec![None; ansatz.k()];
        for (i, t) in terms.iter().enumerate() {
            if t.is_diagonal() {
                diagonal_of[t.n] = Some(i);
            }
        }
        let prepared_diag = |n: usize| diagonal_of[n].is_some() && opts.skip_diagonal != Some(n);
        let sources: Vec<Source> = terms
            .iter()
            .map(|t| {
                if t.is_diagonal() && opts.skip_diagonal == Some(t.n) {
                    Source::Skipped
                } else if opts.elide_odd_p
                    && t.prep.is_odd_superposition()
                    && prepared_diag(t.n)
                    && prepared_diag(t.m)
                {
                    Source::Substituted
                } else {
                    Source::Prepared
                }
            })
            .collect();
        let run = |c: &Circuit| -> Result<Vec<Option<Statevector>>> {
            terms
                .par_iter()
                .zip(&sources)
                .map(|(t, s)| match s {
                    Source::Prepared => evolve(&t.prep, c).map(Some),
                    _ => Ok(None),
                })
                .collect()
        };
        let u_states = run(ansatz.u())?;
        let v_states = if ansatz.same_as_u() {
            None
        } else {
            Some(run(ansatz.v())?)
        };
        Ok(Self {
            n: ansatz.n(),
            terms,
            sources,
            diagonal_of,
            u_states,
            v_states,
        })
    }

    pub fn terms(&self) -> &[ForgedTerm] {
        &self.terms
    }

    /// Number of N-qubit state preparations performed (shared `U = V`
    /// states count once).
    pub fn prepared_count(&self) -> usize {
        let per_register = self.u_states.iter().filter(|s| s.is_some()).count();
        if self.v_states.is_some() {
            2 * per_register
        } else {
            per_register
        }
    }

    pub fn is_prepared(&self, term: usize) -> bool {
        self.sources[term] == Source::Prepared
    }

    fn v_state(&self, i: usize) -> Option<&Statevector> {
        match &self.v_states {
            Some(v) => v[i].as_ref(),
            None => self.u_states[i].as_ref(),
        }
    }

    /// Per-term values `Σ_j c_j Tr(O1_j ρ̃_a) Tr(O2_j ρ̃_a)`; `None` for a
    /// skipped diagonal term. Off-diagonal terms of products with an
    /// identity factor are reported as zero, since they cancel exactly over p.
    pub fn term_values(&self, ops: &[ProductTerm]) -> Result<Vec<Option<f64>>> {
        for (_, o1, o2) in ops {
            check_len(self.n, o1.len())?;
            check_len(self.n, o2.len())?;
        }
        let substituting = self.sources.contains(&Source::Substituted);
        if substituting {
            if let Some((_, o1, o2)) = ops.iter().find(|(_, a, b)| a.y_count() % 2 == 1 || b.y_count() % 2 == 1) {
                return Err(ForgeError::ContractViolation(format!(
                    "odd-p elision needs real observables, got {o1} ⊗ {o2}"
                )));
            }
        }
        let mut index1: HashMap<PauliString, usize> = HashMap::new();
        let mut index2: HashMap<PauliString, usize> = HashMap::new();
        let mut list1 = Vec::new();
        let mut list2 = Vec::new();
        let keyed: Vec<(f64, usize, usize, bool)> = ops
            .iter()
            .map(|(c, o1, o2)| {
                let i1 = *index1.entry(*o1).or_insert_with(|| {
                    list1.push(*o1);
                    list1.len() - 1
                });
                let i2 = *index2.entry(*o2).or_insert_with(|| {
                    list2.push(*o2);
                    list2.len() - 1
                });
                (*c, i1, i2, o1.is_identity() || o2.is_identity())
            })
            .collect();

        let eval = |s: Option<&Statevector>, list: &[PauliString]| -> Result<Option<Vec<f64>>> {
            s.map(|s| list.iter().map(|p| s.pauli_expectation(p)).collect::<Result<Vec<_>>>())
                .transpose()
        };
        type RegisterValues = (Option<Vec<f64>>, Option<Vec<f64>>);
        let values: Vec<RegisterValues> = (0..self.terms.len())
            .into_par_iter()
            .map(|i| -> Result<_> {
                let u = eval(self.u_states[i].as_ref(), &list1)?;
                let v = eval(self.v_state(i), &list2)?;
                Ok((u, v))
            })
            .collect::<Result<_>>()?;

        let mut out = Vec::with_capacity(self.terms.len());
        for (i, t) in self.terms.iter().enumerate() {
            let value = match self.sources[i] {
                Source::Skipped => None,
                Source::Prepared => {
                    let (u, v) = (values[i].0.as_ref().unwrap(), values[i].1.as_ref().unwrap());
                    Some(
                        keyed
                            .iter()
                            .filter(|k| t.is_diagonal() || !k.3)
                            .map(|&(c, i1, i2, _)| c * u[i1] * v[i2])
                            .sum(),
                    )
                }
                Source::Substituted => {
                    let dn = self.diagonal_of[t.n].expect("substituted terms have diagonals");
                    let dm = self.diagonal_of[t.m].expect("substituted terms have diagonals");
                    let (un, vn) = (values[dn].0.as_ref().unwrap(), values[dn].1.as_ref().unwrap());
                    let (um, vm) = (values[dm].0.as_ref().unwrap(), values[dm].1.as_ref().unwrap());
                    Some(
                        keyed
                            .iter()
                            .filter(|k| !k.3)
                            .map(|&(c, i1, i2, _)| c * 0.25 * (un[i1] + um[i1]) * (vn[i2] + vm[i2]))
                            .sum(),
                    )
                }
            };
            out.push(value);
        }
        Ok(out)
    }

    /// `Σ_a μ_a · value_a`; fails if a skipped term is needed.
    pub fn expectation_of(&self, ops: &[ProductTerm]) -> Result<f64> {
        let values = self.term_values(ops)?;
        self.terms
            .iter()
            .zip(values)
            .map(|(t, v)| {
                v.map(|v| t.mu * v).ok_or_else(|| {
                    ForgeError::IncompleteEvaluation(format!("diagonal term {} was skipped", t.n))
                })
            })
            .sum()
    }

    pub fn expectation(&self, o1: &PauliString, o2: &PauliString) -> Result<f64> {
        self.expectation_of(&[(1.0, *o1, *o2)])
    }
}

/// Options used by [`forged_expectation_exact`]: odd-p elision is on when
/// the ansatz circuits and both observables are real.
pub fn default_options(ansatz: &SchmidtAnsatz, ops: &[ProductTerm]) -> EvalOptions {
    let real_ops = ops
        .iter()
        .all(|(_, a, b)| a.y_count() % 2 == 0 && b.y_count() % 2 == 0);
    EvalOptions {
        elide_odd_p: ansatz.is_real() && real_ops,
        skip_diagonal: None,
    }
}

/// `<ψ| O1 ⊗ O2 |ψ>` summed over the superposition decomposition.
pub fn forged_expectation_exact(ansatz: &SchmidtAnsatz, o1: &PauliString, o2: &PauliString) -> Result<f64> {
    let ops = [(1.0, *o1, *o2)];
    let states = ForgedStates::prepare(ansatz, enumerate_forged_terms(ansatz), default_options(ansatz, &ops))?;
    states.expectation_of(&ops)
}

/// Same expectation through the product-state decomposition, returned with
/// its error amplification factor.
pub fn forged_expectation_product_exact(
    ansatz: &SchmidtAnsatz,
    o1: &PauliString,
    o2: &PauliString,
) -> Result<(f64, f64)> {
    let states = ForgedStates::prepare(ansatz, enumerate_product_terms(ansatz), EvalOptions::default())?;
    let value = states.expectation(o1, o2)?;
    Ok((value, super::terms::product_amplification(ansatz)))
}

/// The full 2n-qubit state `(U ⊗ V) Σ λ_n |b_n b_n>`, first register low.
pub fn ansatz_statevector(ansatz: &SchmidtAnsatz) -> Result<Statevector> {
    let n = ansatz.n();
    let mut amps = vec![num_complex::Complex64::new(0.0, 0.0); 1 << (2 * n)];
    for (b, l) in ansatz.bitstrings().iter().zip(ansatz.lambdas()) {
        amps[b.index() | (b.index() << n)] += l;
    }
    let circuit = ansatz
        .u()
        .embedded(2 * n, 0)?
        .then(&ansatz.v().embedded(2 * n, n)?)?;
    Statevector::from_amplitudes(amps)?.evolved(&circuit)
}

/// Direct `<ψ| O1 ⊗ O2 |ψ>` on the 2n-qubit state.
pub fn direct_expectation(ansatz: &SchmidtAnsatz, o1: &PauliString, o2: &PauliString) -> Result<f64> {
    check_len(ansatz.n(), o1.len())?;
    check_len(ansatz.n(), o2.len())?;
    ansatz_statevector(ansatz)?.pauli_expectation(&o1.tensor(o2))
}
