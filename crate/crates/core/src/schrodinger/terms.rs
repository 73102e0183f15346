use crate::bits::BitString;
use crate::error::Result;
use crate::sim::Circuit;

use super::ansatz::SchmidtAnsatz;
use super::prep::{basis_prep_circuit, product_prep_circuit, superposition_prep_circuit};

/// How the N-qubit state `ρ_a` of a forged term is prepared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TermPrep {
    Basis(BitString),
    /// `(|x> + i^p |y>)/√2`.
    Superposition { x: BitString, y: BitString, p: u8 },
    /// Product of single-qubit states with phase `e^{iπp/2d}`.
    Product { x: BitString, y: BitString, p: u32 },
}

impl TermPrep {
    pub fn circuit(&self) -> Result<Circuit> {
        match self {
            TermPrep::Basis(b) => Ok(basis_prep_circuit(b)),
            TermPrep::Superposition { x, y, p } => superposition_prep_circuit(x, y, *p),
            TermPrep::Product { x, y, p } => product_prep_circuit(x, y, *p),
        }
    }

    pub fn is_odd_superposition(&self) -> bool {
        matches!(self, TermPrep::Superposition { p, .. } if p % 2 == 1)
    }
}

/// One `μ_a Tr(O1 ρ_a) Tr(O2 ρ_a)` summand. `weight` is `μ_a / (λ_n λ_m)`,
/// which is what the h-matrix needs; `n == m` marks a diagonal term.
#[derive(Debug, Clone, PartialEq)]
pub struct ForgedTerm {
    pub n: usize,
    pub m: usize,
    pub weight: f64,
    pub mu: f64,
    pub prep: TermPrep,
}

impl ForgedTerm {
    pub fn is_diagonal(&self) -> bool {
        self.n == self.m
    }
}

fn diagonal_terms(a: &SchmidtAnsatz) -> Vec<ForgedTerm> {
    a.bitstrings()
        .iter()
        .zip(a.lambdas())
        .enumerate()
        .map(|(n, (b, l))| ForgedTerm {
            n,
            m: n,
            weight: 1.0,
            mu: l * l,
            prep: TermPrep::Basis(*b),
        })
        .collect()
}

/// The k diagonal terms followed by four superposition terms per pair
/// `m < n`, with `x = b_n`, `y = b_m` and `μ = (-1)^p λ_n λ_m`.
pub fn enumerate_forged_terms(a: &SchmidtAnsatz) -> Vec<ForgedTerm> {
    let mut terms = diagonal_terms(a);
    let (b, l) = (a.bitstrings(), a.lambdas());
    for n in 0..a.k() {
        for m in 0..n {
            for p in 0..4u8 {
                let weight = if p % 2 == 0 { 1.0 } else { -1.0 };
                terms.push(ForgedTerm {
                    n,
                    m,
                    weight,
                    mu: weight * l[n] * l[m],
                    prep: TermPrep::Superposition { x: b[n], y: b[m], p },
                });
            }
        }
    }
    terms
}

/// Diagonal terms plus `4d` product-state terms per pair, each weighted by
/// `(-1)^p 4^d / 4d`.
pub fn enumerate_product_terms(a: &SchmidtAnsatz) -> Vec<ForgedTerm> {
    let mut terms = diagonal_terms(a);
    let (b, l) = (a.bitstrings(), a.lambdas());
    for n in 0..a.k() {
        for m in 0..n {
            let d = b[n].hamming_distance(&b[m]);
            let scale = 4f64.powi(d as i32) / (4.0 * d as f64);
            for p in 0..4 * d {
                let weight = if p % 2 == 0 { scale } else { -scale };
                terms.push(ForgedTerm {
                    n,
                    m,
                    weight,
                    mu: weight * l[n] * l[m],
                    prep: TermPrep::Product { x: b[n], y: b[m], p },
                });
            }
        }
    }
    terms
}

/// `‖μ‖₁ = Σ_a |μ_a|` over the superposition decomposition.
pub fn one_norm_exact(a: &SchmidtAnsatz) -> f64 {
    enumerate_forged_terms(a).iter().map(|t| t.mu.abs()).sum()
}

/// The closed form `1 + 4 ‖λ‖₁²`, an upper bound on [`one_norm_exact`].
pub fn one_norm_closed_form(a: &SchmidtAnsatz) -> f64 {
    1.0 + 4.0 * a.lambda_one_norm().powi(2)
}

/// Error amplification of the product-state decomposition:
/// `1 + Σ_{n<m} |λ_n λ_m| 4^{d_nm}`.
pub fn product_amplification(a: &SchmidtAnsatz) -> f64 {
    let (b, l) = (a.bitstrings(), a.lambdas());
    let mut total = 1.0;
    for n in 0..a.k() {
        for m in 0..n {
            total += (l[n] * l[m]).abs() * 4f64.powi(b[n].hamming_distance(&b[m]) as i32);
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn ansatz(bits: &[&str], lambdas: &[f64]) -> SchmidtAnsatz {
        let n = bits[0].len();
        SchmidtAnsatz::without_circuits(
            n,
            bits.iter().map(|b| b.parse().unwrap()).collect(),
            lambdas.to_vec(),
        )
        .unwrap()
    }

    #[test]
    fn term_counts() {
        let a = ansatz(&["0"], &[1.0]);
        let t = enumerate_forged_terms(&a);
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].mu, 1.0);

        let a = ansatz(&["0", "1"], &[FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
        let t = enumerate_forged_terms(&a);
        assert_eq!(t.len(), 6);
        let mus: Vec<f64> = t.iter().map(|t| (t.mu * 1e12).round() / 1e12).collect();
        assert_eq!(mus, vec![0.5, 0.5, 0.5, -0.5, 0.5, -0.5]);

        let a = ansatz(&["00", "01", "11"], &[0.6, 0.0, 0.8]);
        assert_eq!(enumerate_forged_terms(&a).len(), 15);
    }

    #[test]
    fn one_norms() {
        let a = ansatz(&["0", "1"], &[FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
        assert!((one_norm_exact(&a) - 3.0).abs() < 1e-12);
        assert!((one_norm_closed_form(&a) - 9.0).abs() < 1e-12);
        assert!((product_amplification(&a) - 3.0).abs() < 1e-12);

        let a = ansatz(&["00", "11"], &[FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
        assert!((product_amplification(&a) - 9.0).abs() < 1e-12);
        assert_eq!(enumerate_product_terms(&a).len(), 2 + 8);

        let a = ansatz(&["101"], &[1.0]);
        assert_eq!(one_norm_exact(&a), 1.0);
        assert_eq!(product_amplification(&a), 1.0);
    }
}
