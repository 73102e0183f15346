use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{ForgeError, Result};

use super::gate::{Angle, Gate};

/// An ordered gate list on a fixed register. The first gate acts first.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(n_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut c = Circuit::new(n_qubits);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        let targets = gate.targets();
        if let Some(&q) = targets.iter().find(|&&q| q >= self.n_qubits) {
            return Err(ForgeError::Input(format!(
                "gate `{gate}` targets qubit {q} outside a {}-qubit register",
                self.n_qubits
            )));
        }
        if targets.len() == 2 && targets[0] == targets[1] {
            return Err(ForgeError::Input(format!(
                "gate `{gate}` repeats target qubit {}",
                targets[0]
            )));
        }
        if let Some(Angle::Fixed(v)) = gate.angle() {
            if !v.is_finite() {
                return Err(ForgeError::NonFinite(format!("angle in `{gate}`")));
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Append every gate of `other` (same register size).
    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(ForgeError::LengthMismatch {
                expected: self.n_qubits,
                found: other.n_qubits,
            });
        }
        self.gates.extend(other.gates.iter().cloned());
        Ok(())
    }

    pub fn then(mut self, other: &Circuit) -> Result<Circuit> {
        self.extend(other)?;
        Ok(self)
    }

    /// Reverse order, each gate replaced by its inverse.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    /// Embed into a larger register, shifting every target by `offset`.
    pub fn embedded(&self, total_qubits: usize, offset: usize) -> Result<Circuit> {
        if offset + self.n_qubits > total_qubits {
            return Err(ForgeError::Input(format!(
                "cannot place a {}-qubit circuit at offset {offset} in {total_qubits} qubits",
                self.n_qubits
            )));
        }
        Ok(Circuit {
            n_qubits: total_qubits,
            gates: self
                .gates
                .iter()
                .map(|g| g.map_qubits(|q| q + offset))
                .collect(),
        })
    }

    /// Names of all unbound parameter slots, sorted.
    pub fn parameter_names(&self) -> BTreeSet<String> {
        self.gates
            .iter()
            .filter_map(|g| match g.angle() {
                Some(Angle::Param { name, .. }) => Some(name.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn is_bound(&self) -> bool {
        self.gates.iter().all(Gate::is_bound)
    }

    pub fn bind(&self, params: &HashMap<String, f64>) -> Result<Circuit> {
        Ok(Circuit {
            n_qubits: self.n_qubits,
            gates: self
                .gates
                .iter()
                .map(|g| g.bind(params))
                .collect::<Result<_>>()?,
        })
    }

    /// All gates have real matrices in the computational basis.
    pub fn is_real(&self) -> bool {
        self.gates.iter().all(Gate::is_real)
    }

    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }

    /// Parse the line format `KIND q1 [q2] [angle]`; `#` starts a comment.
    /// Angles are literals or parameter names (optionally prefixed by `-`).
    pub fn parse(n_qubits: usize, text: &str) -> Result<Circuit> {
        Circuit::parse_lines(n_qubits, text.lines().enumerate().map(|(i, l)| (i + 1, l)))
    }

    pub(crate) fn parse_lines<'a>(
        n_qubits: usize,
        lines: impl Iterator<Item = (usize, &'a str)>,
    ) -> Result<Circuit> {
        let mut circuit = Circuit::new(n_qubits);
        for (line_no, raw) in lines {
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let gate = parse_gate(line).map_err(|m| ForgeError::parse(line_no, m))?;
            circuit
                .push(gate)
                .map_err(|e| ForgeError::parse(line_no, e.to_string()))?;
        }
        Ok(circuit)
    }
}

pub(crate) fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => line[..i].trim(),
        None => line.trim(),
    }
}

fn parse_angle(token: &str) -> std::result::Result<Angle, String> {
    if let Ok(v) = token.parse::<f64>() {
        if !v.is_finite() {
            return Err(format!("non-finite angle `{token}`"));
        }
        return Ok(Angle::Fixed(v));
    }
    let (negated, name) = match token.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, token),
    };
    let valid = name
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if !valid {
        return Err(format!("invalid angle `{token}`"));
    }
    Ok(Angle::Param {
        name: name.to_string(),
        negated,
    })
}

fn parse_gate(line: &str) -> std::result::Result<Gate, String> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    let kind = tokens[0].to_ascii_uppercase();
    let args = &tokens[1..];
    let qubit = |i: usize| -> std::result::Result<usize, String> {
        args.get(i)
            .ok_or_else(|| format!("`{kind}` is missing qubit operand {}", i + 1))?
            .parse::<usize>()
            .map_err(|_| format!("invalid qubit index `{}`", args[i]))
    };
    let expect_args = |n: usize| -> std::result::Result<(), String> {
        if args.len() == n {
            Ok(())
        } else {
            Err(format!("`{kind}` expects {n} operands, found {}", args.len()))
        }
    };
    let gate = match kind.as_str() {
        "X" | "Y" | "Z" | "H" | "S" | "SDG" => {
            expect_args(1)?;
            let q = qubit(0)?;
            match kind.as_str() {
                "X" => Gate::X(q),
                "Y" => Gate::Y(q),
                "Z" => Gate::Z(q),
                "H" => Gate::H(q),
                "S" => Gate::S(q),
                _ => Gate::Sdg(q),
            }
        }
        "RY" | "RZ" => {
            expect_args(2)?;
            let q = qubit(0)?;
            let a = parse_angle(args[1])?;
            if kind == "RY" {
                Gate::Ry(q, a)
            } else {
                Gate::Rz(q, a)
            }
        }
        "CNOT" | "CZ" | "SWAP" => {
            expect_args(2)?;
            let (a, b) = (qubit(0)?, qubit(1)?);
            match kind.as_str() {
                "CNOT" => Gate::Cnot(a, b),
                "CZ" => Gate::Cz(a, b),
                _ => Gate::Swap(a, b),
            }
        }
        "HOP" | "MODHOP" => {
            expect_args(3)?;
            let (a, b) = (qubit(0)?, qubit(1)?);
            let t = parse_angle(args[2])?;
            if kind == "HOP" {
                Gate::Hop(a, b, t)
            } else {
                Gate::ModHop(a, b, t)
            }
        }
        other => return Err(format!("unknown gate kind `{other}`")),
    };
    Ok(gate)
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}
