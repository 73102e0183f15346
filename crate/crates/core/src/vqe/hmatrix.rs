use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{ForgeError, Result};
use crate::schrodinger::{ForgedStates, ProductTerm, SchmidtAnsatz};

const SYMMETRY_TOLERANCE: f64 = 1e-10;
/// Eigenvalues this close to the minimum count as degenerate.
const DEGENERACY_TOLERANCE: f64 = 1e-10;

/// Symmetric `k×k` matrix with `<H> = Σ λ_n λ_m h_nm`.
#[derive(Debug, Clone, PartialEq)]
pub struct HMatrix(DMatrix<f64>);

impl HMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(ForgeError::Input(format!("h-matrix is {}x{}", m.nrows(), m.ncols())));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(ForgeError::NonFinite("h-matrix entry".into()));
        }
        let asym = (&m - m.transpose()).abs().max();
        if asym > SYMMETRY_TOLERANCE {
            return Err(ForgeError::Input(format!("h-matrix is not symmetric (max deviation {asym:e})")));
        }
        Ok(Self(m))
    }

    pub fn k(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn energy(&self, lambdas: &[f64]) -> f64 {
        let l = DVector::from_column_slice(lambdas);
        (l.transpose() * &self.0 * &l)[(0, 0)]
    }
}

/// Per-term values of the forged decomposition, grouped by bitstring pair:
/// `h_nn` directly and `g_nm = Σ_p w_p value_p` for `n > m`.
#[derive(Debug, Clone, PartialEq)]
pub struct HPieces {
    k: usize,
    diagonal: Vec<Option<f64>>,
    pairs: Vec<Option<f64>>,
}

fn pair_index(n: usize, m: usize) -> usize {
    debug_assert!(n > m);
    n * (n - 1) / 2 + m
}

impl HPieces {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            diagonal: vec![None; k],
            pairs: vec![None; k * k.saturating_sub(1) / 2],
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn set_diagonal(&mut self, n: usize, value: f64) {
        self.diagonal[n] = Some(value);
    }

    /// Accumulate into the off-diagonal piece of `(n, m)`, either order.
    pub fn add_pair(&mut self, n: usize, m: usize, value: f64) {
        let (hi, lo) = if n > m { (n, m) } else { (m, n) };
        *self.pairs[pair_index(hi, lo)].get_or_insert(0.0) += value;
    }

    pub fn diagonal(&self, n: usize) -> Option<f64> {
        self.diagonal[n]
    }

    pub fn pair(&self, n: usize, m: usize) -> Option<f64> {
        let (hi, lo) = if n > m { (n, m) } else { (m, n) };
        self.pairs[pair_index(hi, lo)]
    }

    /// Fill every piece from the forged term values. A skipped diagonal
    /// term is left empty.
    pub fn from_term_values(states: &ForgedStates, values: &[Option<f64>], k: usize) -> Self {
        let mut pieces = HPieces::new(k);
        for (t, v) in states.terms().iter().zip(values) {
            let Some(v) = v else { continue };
            if t.is_diagonal() {
                pieces.set_diagonal(t.n, *v);
            } else {
                pieces.add_pair(t.n, t.m, t.weight * v);
            }
        }
        pieces
    }
}

/// Symmetric h-matrix with `h_nn` on the diagonal and `h_nm = h_mn = g_nm/2`.
pub fn assemble_h_matrix(pieces: &HPieces) -> Result<HMatrix> {
    let k = pieces.k;
    let mut m = DMatrix::zeros(k, k);
    for n in 0..k {
        m[(n, n)] = pieces.diagonal[n]
            .ok_or_else(|| ForgeError::IncompleteEvaluation(format!("diagonal piece {n} missing")))?;
        for j in 0..n {
            let g = pieces
                .pair(n, j)
                .ok_or_else(|| ForgeError::IncompleteEvaluation(format!("pair piece ({n}, {j}) missing")))?;
            m[(n, j)] = g / 2.0;
            m[(j, n)] = g / 2.0;
        }
    }
    HMatrix::new(m)
}

/// Unit-norm eigenvector of the smallest eigenvalue, with its eigenvalue.
///
/// The vector is the normalized projection of the first standard basis
/// vector with a non-negligible component in the lowest eigenspace, so
/// degenerate cases do not depend on the eigensolver's basis. The first
/// nonzero component is made positive.
pub fn update_lambda(h: &HMatrix) -> (Vec<f64>, f64) {
    let eig = SymmetricEigen::new(h.0.clone());
    let min = eig.eigenvalues.min();
    let cols: Vec<usize> = (0..h.k())
        .filter(|&i| eig.eigenvalues[i] - min <= DEGENERACY_TOLERANCE * min.abs().max(1.0))
        .collect();
    let space = eig.eigenvectors.select_columns(&cols);
    let projector = &space * space.transpose();
    let mut v = (0..h.k())
        .map(|i| projector.column(i).into_owned())
        .find(|c| c.norm() > 1e-8)
        .expect("a nonempty eigenspace has a nonzero projection of some basis vector");
    v /= v.norm();
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
        if *first < 0.0 {
            v = -v;
        }
    }
    (v.iter().copied().collect(), min)
}

/// Exact pieces for every term of `ops`. `ansatz` supplies bitstrings and
/// circuits; its `λ` are ignored. With `frozen_diag`, the first diagonal
/// piece is set to that value and its circuit is never prepared.
pub fn exact_pieces(
    ansatz: &SchmidtAnsatz,
    ops: &[ProductTerm],
    frozen_diag: Option<f64>,
) -> Result<(HPieces, ForgedStates)> {
    let mut opts = crate::schrodinger::default_options(ansatz, ops);
    opts.skip_diagonal = frozen_diag.map(|_| 0);
    let terms = crate::schrodinger::enumerate_forged_terms(ansatz);
    let states = ForgedStates::prepare(ansatz, terms, opts)?;
    let values = states.term_values(ops)?;
    let mut pieces = HPieces::from_term_values(&states, &values, ansatz.k());
    if let Some(e) = frozen_diag {
        pieces.set_diagonal(0, e);
    }
    Ok((pieces, states))
}
