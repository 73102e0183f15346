use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::bits::BitString;
use crate::error::{ForgeError, Result};
use crate::sim::{strip_comment, Circuit};

/// Tolerance on `Σ λ² = 1`.
pub const LAMBDA_NORM_TOLERANCE: f64 = 1e-10;

/// `|ψ> = (U ⊗ V) Σ_n λ_n |b_n> ⊗ |b_n>`, with the first register on the
/// low qubits. `v = None` means `V = U`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtAnsatz {
    n: usize,
    bitstrings: Vec<BitString>,
    lambdas: Vec<f64>,
    u: Circuit,
    v: Option<Circuit>,
}

impl SchmidtAnsatz {
    pub fn new(
        n: usize,
        bitstrings: Vec<BitString>,
        lambdas: Vec<f64>,
        u: Circuit,
        v: Option<Circuit>,
    ) -> Result<Self> {
        if bitstrings.is_empty() {
            return Err(ForgeError::Input("ansatz needs at least one bitstring".into()));
        }
        if bitstrings.len() != lambdas.len() {
            return Err(ForgeError::LengthMismatch {
                expected: bitstrings.len(),
                found: lambdas.len(),
            });
        }
        if let Some(b) = bitstrings.iter().find(|b| b.len() != n) {
            return Err(ForgeError::Input(format!(
                "bitstring {b} does not have {n} bits"
            )));
        }
        let distinct: BTreeSet<_> = bitstrings.iter().collect();
        if distinct.len() != bitstrings.len() {
            return Err(ForgeError::Input("bitstrings must be distinct".into()));
        }
        check_lambdas(&lambdas)?;
        for c in std::iter::once(&u).chain(v.as_ref()) {
            if c.n_qubits() != n {
                return Err(ForgeError::LengthMismatch {
                    expected: n,
                    found: c.n_qubits(),
                });
            }
        }
        Ok(Self {
            n,
            bitstrings,
            lambdas,
            u,
            v,
        })
    }

    /// Identity `U = V` on `n` qubits.
    pub fn without_circuits(n: usize, bitstrings: Vec<BitString>, lambdas: Vec<f64>) -> Result<Self> {
        SchmidtAnsatz::new(n, bitstrings, lambdas, Circuit::new(n), None)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.bitstrings.len()
    }

    pub fn bitstrings(&self) -> &[BitString] {
        &self.bitstrings
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn u(&self) -> &Circuit {
        &self.u
    }

    /// The second-register circuit (which is `U` when shared).
    pub fn v(&self) -> &Circuit {
        self.v.as_ref().unwrap_or(&self.u)
    }

    pub fn same_as_u(&self) -> bool {
        self.v.is_none()
    }

    /// True when every gate of `U` and `V` has a real matrix.
    pub fn is_real(&self) -> bool {
        self.u.is_real() && self.v().is_real()
    }

    pub fn with_lambdas(&self, lambdas: Vec<f64>) -> Result<Self> {
        SchmidtAnsatz::new(self.n, self.bitstrings.clone(), lambdas, self.u.clone(), self.v.clone())
    }

    pub fn with_circuits(&self, u: Circuit, v: Option<Circuit>) -> Result<Self> {
        SchmidtAnsatz::new(self.n, self.bitstrings.clone(), self.lambdas.clone(), u, v)
    }

    /// Bind named angles in both circuits.
    pub fn bind(&self, params: &HashMap<String, f64>) -> Result<Self> {
        let v = self.v.as_ref().map(|c| c.bind(params)).transpose()?;
        self.with_circuits(self.u.bind(params)?, v)
    }

    /// `‖λ‖₁`.
    pub fn lambda_one_norm(&self) -> f64 {
        self.lambdas.iter().map(|l| l.abs()).sum()
    }

    /// Parse the ansatz text format:
    ///
    /// ```text
    /// n 2 k 2
    /// 00 0.7071067811865476
    /// 11 -0.7071067811865476
    /// U
    /// HOP 0 1 theta
    /// V            # optional; omitted means V = U
    /// ```
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ForgeError::Io(format!("{}: {e}", path.display())))?;
        SchmidtAnsatz::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, strip_comment(l)))
            .filter(|(_, l)| !l.is_empty());
        let (line_no, header) = lines
            .next()
            .ok_or_else(|| ForgeError::parse(1, "missing `n <int> k <int>` header"))?;
        let tokens: Vec<&str> = header.split_whitespace().collect();
        let (n, k) = match tokens.as_slice() {
            ["n", n, "k", k] => (
                n.parse::<usize>()
                    .map_err(|_| ForgeError::parse(line_no, format!("invalid n `{n}`")))?,
                k.parse::<usize>()
                    .map_err(|_| ForgeError::parse(line_no, format!("invalid k `{k}`")))?,
            ),
            _ => return Err(ForgeError::parse(line_no, "expected `n <int> k <int>`")),
        };
        let mut bitstrings = Vec::with_capacity(k);
        let mut lambdas = Vec::with_capacity(k);
        for _ in 0..k {
            let (line_no, line) = lines
                .next()
                .ok_or_else(|| ForgeError::parse(line_no, format!("expected {k} bitstring lines")))?;
            let mut parts = line.split_whitespace();
            let (Some(b), Some(l), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(ForgeError::parse(line_no, "expected `bitstring lambda`"));
            };
            let b: BitString = b.parse().map_err(|e: ForgeError| ForgeError::parse(line_no, e.to_string()))?;
            if b.len() != n {
                return Err(ForgeError::parse(line_no, format!("bitstring {b} does not have {n} bits")));
            }
            let l: f64 = l
                .parse()
                .map_err(|_| ForgeError::parse(line_no, format!("invalid lambda `{l}`")))?;
            bitstrings.push(b);
            lambdas.push(l);
        }
        let rest: Vec<(usize, &str)> = lines.collect();
        let mut u_lines = Vec::new();
        let mut v_lines: Option<Vec<(usize, &str)>> = None;
        let mut section: Option<char> = None;
        for (line_no, line) in rest {
            match line {
                "U" if section.is_none() => section = Some('U'),
                "V" if section == Some('U') => {
                    section = Some('V');
                    v_lines = Some(Vec::new());
                }
                _ => match section {
                    Some('U') => u_lines.push((line_no, line)),
                    Some(_) => v_lines.as_mut().expect("V section open").push((line_no, line)),
                    None => return Err(ForgeError::parse(line_no, "expected `U` section marker")),
                },
            }
        }
        let u = Circuit::parse_lines(n, u_lines.into_iter())?;
        let v = v_lines.map(|l| Circuit::parse_lines(n, l.into_iter())).transpose()?;
        SchmidtAnsatz::new(n, bitstrings, lambdas, u, v)
    }
}

impl fmt::Display for SchmidtAnsatz {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n {} k {}", self.n, self.k())?;
        for (b, l) in self.bitstrings.iter().zip(&self.lambdas) {
            writeln!(f, "{b} {l:?}")?;
        }
        writeln!(f, "U")?;
        write!(f, "{}", self.u)?;
        if let Some(v) = &self.v {
            writeln!(f, "V")?;
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

pub(crate) fn check_lambdas(lambdas: &[f64]) -> Result<()> {
    if let Some(l) = lambdas.iter().find(|l| !l.is_finite()) {
        return Err(ForgeError::NonFinite(format!("Schmidt coefficient {l}")));
    }
    let norm: f64 = lambdas.iter().map(|l| l * l).sum();
    if (norm - 1.0).abs() > LAMBDA_NORM_TOLERANCE {
        return Err(ForgeError::Input(format!(
            "Schmidt coefficients have squared norm {norm}, expected 1"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const BELL: &str = "n 1 k 2\n0 0.7071067811865476\n1 0.7071067811865476\nU\n";

    #[test]
    fn parse_bell() {
        let a = SchmidtAnsatz::parse(BELL).unwrap();
        assert_eq!(a.k(), 2);
        assert!(a.same_as_u());
        assert!(a.u().is_empty());
    }

    #[test]
    fn round_trip_with_v() {
        let text = "n 2 k 2\n01 0.6\n10 -0.8\nU\nHOP 0 1 theta\nRY 1 0.25\nV\nH 0\n";
        let a = SchmidtAnsatz::parse(text).unwrap();
        assert!(!a.same_as_u());
        let printed = a.to_string();
        assert_eq!(SchmidtAnsatz::parse(&printed).unwrap(), a);
        assert_eq!(SchmidtAnsatz::parse(&printed).unwrap().to_string(), printed);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SchmidtAnsatz::parse("n 1 k 2\n0 0.6\n0 0.8\nU\n").is_err());
        assert!(SchmidtAnsatz::parse("n 1 k 2\n0 0.6\n1 0.6\nU\n").is_err());
        let err = SchmidtAnsatz::parse("n 1 k 1\n0 1.0\nU\nFOO 0\n").unwrap_err();
        assert_eq!(err, ForgeError::parse(4, err_message(&err)));
        assert!(matches!(
            SchmidtAnsatz::parse("n 2 k 1\n0 1.0\nU\n"),
            Err(ForgeError::Parse { line: 2, .. })
        ));
    }

    fn err_message(e: &ForgeError) -> String {
        match e {
            ForgeError::Parse { message, .. } => message.clone(),
            _ => panic!("not a parse error"),
        }
    }
}
