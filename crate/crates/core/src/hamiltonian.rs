//! Bipartite Pauli-sum Hamiltonians and their text format.
//!
//! ```text
//! # comment
//! qubits 4 partition 2
//! manifest terms 2 checksum 1.5
//! -1.0 ZIZI
//! 0.5 XXYY
//! ```
//!
//! The letter at position `j` acts on qubit `j`; the first `partition`
//! letters form the low register. The optional manifest line is checked
//! against the term count and `Σ|c|`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dense::{self, CMatrix};
use crate::error::{ForgeError, Result};
use crate::pauli::{PauliString, MAX_QUBITS};
use crate::schrodinger::ProductTerm;
use crate::sim::strip_comment;

/// Relative tolerance for the manifest checksum.
const CHECKSUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    n_qubits: usize,
    partition: usize,
    /// Unsigned Pauli strings; signs live in the coefficients.
    terms: Vec<(f64, PauliString)>,
}

impl Hamiltonian {
    pub fn new(n_qubits: usize, partition: usize, terms: Vec<(f64, PauliString)>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(ForgeError::Input(format!("qubit count {n_qubits} outside 1..={MAX_QUBITS}")));
        }
        if 2 * partition != n_qubits {
            return Err(ForgeError::Input(format!(
                "partition {partition} does not split {n_qubits} qubits into equal registers"
            )));
        }
        let mut clean = Vec::with_capacity(terms.len());
        for (c, p) in terms {
            if !c.is_finite() {
                return Err(ForgeError::NonFinite(format!("coefficient {c} on {p}")));
            }
            if p.len() != n_qubits {
                return Err(ForgeError::LengthMismatch {
                    expected: n_qubits,
                    found: p.len(),
                });
            }
            let c = if p.is_negative() { -c } else { c };
            clean.push((c, p.unsigned()));
        }
        Ok(Self {
            n_qubits,
            partition,
            terms: clean,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Qubits per register.
    pub fn partition(&self) -> usize {
        self.partition
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Σ|c|` over all terms.
    pub fn checksum(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.abs()).sum()
    }

    /// Every term as `(c, O1, O2)` with `O1` on the low register.
    pub fn split_terms(&self) -> Vec<ProductTerm> {
        self.terms
            .iter()
            .map(|(c, p)| {
                let (o1, o2) = p.split(self.partition);
                (*c, o1, o2)
            })
            .collect()
    }

    /// True iff every split factor has an even number of Y letters, so both
    /// `O1` and `O2` are real matrices.
    pub fn validate_realness(&self) -> bool {
        self.split_terms()
            .iter()
            .all(|(_, o1, o2)| o1.y_count() % 2 == 0 && o2.y_count() % 2 == 0)
    }

    pub fn dense_matrix(&self) -> CMatrix {
        let dim = 1usize << self.n_qubits;
        let mut m = CMatrix::zeros(dim, dim);
        for (c, p) in &self.terms {
            m += dense::pauli_matrix(p) * Complex64::new(*c, 0.0);
        }
        m
    }

    /// Lowest eigenvalue over the full register.
    pub fn ground_energy(&self) -> f64 {
        dense::ground_energy(&self.dense_matrix())
    }

    /// Lowest eigenvalue among basis states with `low` ones in the low
    /// register and `high` ones in the high register. Pauli terms map basis
    /// states to basis states, so the block is assembled directly.
    pub fn sector_ground_energy(&self, low: usize, high: usize) -> Result<f64> {
        let n = self.partition;
        if low > n || high > n {
            return Err(ForgeError::Input(format!("sector ({low}, {high}) exceeds {n} qubits per register")));
        }
        let mask = (1usize << n) - 1;
        let basis: Vec<usize> = (0..1usize << self.n_qubits)
            .filter(|b| (b & mask).count_ones() as usize == low && (b >> n).count_ones() as usize == high)
            .collect();
        let mut position = vec![usize::MAX; 1 << self.n_qubits];
        for (i, &b) in basis.iter().enumerate() {
            position[b] = i;
        }
        let mut m = CMatrix::zeros(basis.len(), basis.len());
        for (c, p) in &self.terms {
            let flip = p.x_mask() as usize;
            for (col, &b) in basis.iter().enumerate() {
                let row = position[b ^ flip];
                if row != usize::MAX {
                    m[(row, col)] += p.phase_on(b as u64) * *c;
                }
            }
        }
        Ok(dense::ground_energy(&m))
    }

    /// Real symmetric matrix for Hamiltonians whose total Y count is even
    /// on every term; `None` otherwise.
    pub fn real_matrix(&self) -> Option<DMatrix<f64>> {
        let m = self.dense_matrix();
        m.iter().all(|z| z.im.abs() < 1e-14).then(|| m.map(|z| z.re))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize, usize)> = None;
        let mut manifest: Option<(usize, usize, f64)> = None;
        let mut terms = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let no = i + 1;
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            match tokens[0] {
                "qubits" => {
                    if header.is_some() {
                        return Err(ForgeError::parse(no, "duplicate header"));
                    }
                    header = Some(parse_header(&tokens, no)?);
                }
                "manifest" => {
                    if manifest.is_some() {
                        return Err(ForgeError::parse(no, "duplicate manifest line"));
                    }
                    manifest = Some(parse_manifest(&tokens, no)?);
                }
                _ => {
                    let (n, _, _) = header.ok_or_else(|| ForgeError::parse(no, "term before the 'qubits' header"))?;
                    terms.push(parse_term(&tokens, n, no)?);
                }
            }
        }
        let (n, partition, header_line) = header.ok_or_else(|| ForgeError::parse(1, "missing 'qubits' header"))?;
        let h = Hamiltonian::new(n, partition, terms).map_err(|e| ForgeError::parse(header_line, e.to_string()))?;
        if let Some((count, line, sum)) = manifest {
            if count != h.len() {
                return Err(ForgeError::parse(line, format!("manifest lists {count} terms, file has {}", h.len())));
            }
            let actual = h.checksum();
            if (actual - sum).abs() > CHECKSUM_TOLERANCE * sum.abs().max(1.0) {
                return Err(ForgeError::parse(line, format!("checksum {sum} does not match {actual}")));
            }
        }
        Ok(h)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ForgeError::Io(format!("{}: {e}", path.display())))?;
        Hamiltonian::parse(&text)
    }
}

fn parse_header(tokens: &[&str], no: usize) -> Result<(usize, usize, usize)> {
    let number = |s: &str| -> Result<usize> {
        s.parse().map_err(|_| ForgeError::parse(no, format!("invalid count {s:?}")))
    };
    let n = number(tokens.get(1).ok_or_else(|| ForgeError::parse(no, "missing qubit count"))?)?;
    let partition = match tokens.get(2..) {
        Some(["partition", p]) => number(p)?,
        Some([]) => {
            if n % 2 == 1 {
                return Err(ForgeError::parse(no, format!("odd qubit count {n} needs an explicit partition")));
            }
            n / 2
        }
        _ => return Err(ForgeError::parse(no, "expected 'qubits <2n> [partition <n>]'")),
    };
    Ok((n, partition, no))
}

fn parse_manifest(tokens: &[&str], no: usize) -> Result<(usize, usize, f64)> {
    match tokens {
        ["manifest", "terms", count, "checksum", sum] => {
            let count = count
                .parse()
                .map_err(|_| ForgeError::parse(no, format!("invalid term count {count:?}")))?;
            let sum = sum
                .parse()
                .map_err(|_| ForgeError::parse(no, format!("invalid checksum {sum:?}")))?;
            Ok((count, no, sum))
        }
        _ => Err(ForgeError::parse(no, "expected 'manifest terms <count> checksum <sum>'")),
    }
}

fn parse_term(tokens: &[&str], n: usize, no: usize) -> Result<(f64, PauliString)> {
    let [coeff, pauli] = tokens else {
        return Err(ForgeError::parse(no, "expected '<coefficient> <pauli>'"));
    };
    let c: f64 = coeff
        .parse()
        .map_err(|_| ForgeError::parse(no, format!("invalid coefficient {coeff:?}")))?;
    if !c.is_finite() {
        return Err(ForgeError::parse(no, format!("non-finite coefficient {coeff}")));
    }
    let p: PauliString = pauli.parse().map_err(|e: ForgeError| ForgeError::parse(no, e.to_string()))?;
    if p.len() != n {
        return Err(ForgeError::parse(no, format!("Pauli string has {} letters, header says {n}", p.len())));
    }
    Ok((c, p))
}

impl FromStr for Hamiltonian {
    type Err = ForgeError;

    fn from_str(s: &str) -> Result<Self> {
        Hamiltonian::parse(s)
    }
}

/// Prints the header, a manifest line and one term per line. Coefficients
/// use the shortest representation that parses back to the same `f64`.
impl fmt::Display for Hamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {} partition {}", self.n_qubits, self.partition)?;
        writeln!(f, "manifest terms {} checksum {:?}", self.len(), self.checksum())?;
        for (c, p) in &self.terms {
            let letters: String = p.letters().iter().map(|l| l.as_char()).collect();
            writeln!(f, "{c:?} {letters}")?;
        }
        Ok(())
    }
}
