//! Constructive Clifford synthesis for pairs of Pauli observables and the
//! resulting decomposition of `O1⊗O2 + O2⊗O1` into `C*⊗C` terms.
//!
//! Ties ("some a in A") are always broken by the lowest qubit index.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::clifford::{CliffordCircuit, CliffordGate};
use crate::error::{check_len, ForgeError, Result};
use crate::pauli::{Letter, PauliString};

/// Qubits grouped by how the standardized pair acts on them:
///
/// | set | O1 | O2 |
/// |-----|----|----|
/// | A   | X  | Z  |
/// | B   | Z  | I  |
/// | C   | I  | Z  |
/// | D   | Z  | Z  |
/// | E   | I  | I  |
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PauliPartition {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub c: Vec<usize>,
    pub d: Vec<usize>,
    pub e: Vec<usize>,
}

impl PauliPartition {
    /// Classify a pair already in standard form.
    pub fn classify(o1: &PauliString, o2: &PauliString) -> Result<Self> {
        check_len(o1.len(), o2.len())?;
        let mut part = PauliPartition::default();
        for q in 0..o1.len() {
            let set = match (o1.letter(q), o2.letter(q)) {
                (Letter::X, Letter::Z) => &mut part.a,
                (Letter::Z, Letter::I) => &mut part.b,
                (Letter::I, Letter::Z) => &mut part.c,
                (Letter::Z, Letter::Z) => &mut part.d,
                (Letter::I, Letter::I) => &mut part.e,
                (l1, l2) => {
                    return Err(ForgeError::ContractViolation(format!(
                        "qubit {q} carries ({}, {}), not a standard-form pair",
                        l1.as_char(),
                        l2.as_char()
                    )))
                }
            };
            set.push(q);
        }
        Ok(part)
    }
}

/// Single-qubit words over {H, S} in breadth-first order; enough to realize
/// every permutation of the three non-identity letters.
fn single_qubit_words() -> Vec<Vec<bool>> {
    let mut words = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..4 {
        let mut next = Vec::new();
        for w in &frontier {
            for s in [false, true] {
                let mut w2: Vec<bool> = w.clone();
                w2.push(s);
                next.push(w2);
            }
        }
        words.extend(next.iter().cloned());
        frontier = next;
    }
    words
}

fn standard_target(l1: Letter, l2: Letter) -> (Letter, Letter) {
    use Letter::*;
    match (l1, l2) {
        (I, I) => (I, I),
        (_, I) => (Z, I),
        (I, _) => (I, Z),
        (a, b) if a == b => (Z, Z),
        _ => (X, Z),
    }
}

/// Single-qubit Clifford layer `W` such that `W† O1 W` and `W† O2 W` are in
/// standard form, together with the resulting partition.
pub fn standard_form(o1: &PauliString, o2: &PauliString) -> Result<(CliffordCircuit, PauliPartition)> {
    check_len(o1.len(), o2.len())?;
    let n = o1.len();
    let words = single_qubit_words();
    let mut w = CliffordCircuit::new(n);
    for q in 0..n {
        let (l1, l2) = (o1.letter(q), o2.letter(q));
        let want = standard_target(l1, l2);
        let p1 = PauliString::single(1, 0, l1);
        let p2 = PauliString::single(1, 0, l2);
        let word = words
            .iter()
            .map(|word| {
                let gates = word
                    .iter()
                    .map(|&s| if s { CliffordGate::S(0) } else { CliffordGate::H(0) })
                    .collect();
                CliffordCircuit::from_gates(1, gates).expect("single-qubit word")
            })
            .find(|c| {
                c.preimage(&p1).map(|p| p.letter(0)).ok() == Some(want.0)
                    && c.preimage(&p2).map(|p| p.letter(0)).ok() == Some(want.1)
            })
            .expect("every letter pair has a standardizing Clifford");
        for g in word.gates() {
            let g = match *g {
                CliffordGate::H(_) => CliffordGate::H(q),
                _ => CliffordGate::S(q),
            };
            w.push(g)?;
        }
    }
    let part = PauliPartition::classify(&w.preimage(o1)?, &w.preimage(o2)?)?;
    Ok((w, part))
}

/// Running reduction `O <- W† O W`, accumulating `V = W_1 W_2 ...`.
struct Reduction {
    o1: PauliString,
    o2: PauliString,
    v: CliffordCircuit,
}

impl Reduction {
    fn new(o1: &PauliString, o2: &PauliString) -> Self {
        Self {
            o1: *o1,
            o2: *o2,
            v: CliffordCircuit::new(o1.len()),
        }
    }

    fn apply(&mut self, w: &CliffordCircuit) -> Result<()> {
        self.o1 = w.preimage(&self.o1)?;
        self.o2 = w.preimage(&self.o2)?;
        self.v = w.clone().then(&self.v);
        Ok(())
    }

    fn gate(&mut self, g: CliffordGate) -> Result<()> {
        let w = CliffordCircuit::from_gates(self.o1.len(), vec![g])?;
        self.apply(&w)
    }

    fn partition(&self) -> Result<PauliPartition> {
        PauliPartition::classify(&self.o1, &self.o2)
    }
}

fn require_non_identity(o1: &PauliString, o2: &PauliString) -> Result<()> {
    check_len(o1.len(), o2.len())?;
    if o1.is_identity() || o2.is_identity() {
        return Err(ForgeError::ContractViolation(
            "synthesis needs non-identity observables".into(),
        ));
    }
    Ok(())
}

/// Clifford `V` and qubit `q` with `V X_q V† = O1` and `V Z_q V† = O2`
/// (signs included) for anticommuting `O1`, `O2`.
pub fn synthesize_anticommuting(o1: &PauliString, o2: &PauliString) -> Result<(CliffordCircuit, usize)> {
    require_non_identity(o1, o2)?;
    if o1.commutes(o2)? {
        return Err(ForgeError::ContractViolation(format!(
            "{o1} and {o2} commute; expected an anticommuting pair"
        )));
    }
    let mut r = Reduction::new(o1, o2);
    r.apply(&standard_form(o1, o2)?.0)?;
    loop {
        let part = r.partition()?;
        let a = part.a[0];
        if let Some(&b) = part.b.first() {
            r.gate(CliffordGate::Cz(a, b))?;
        } else if let Some(cd) = part.c.iter().chain(&part.d).copied().min() {
            r.gate(CliffordGate::Cnot(cd, a))?;
        } else {
            break;
        }
    }
    let a = r.partition()?.a;
    let q = a[0];
    for pair in a[1..].chunks(2) {
        let (t1, t2) = (pair[0], pair[1]);
        r.gate(CliffordGate::Cnot(t2, t1))?;
        r.gate(CliffordGate::Cnot(t1, q))?;
        r.gate(CliffordGate::Cnot(q, t2))?;
    }
    match (r.o1.is_negative(), r.o2.is_negative()) {
        (true, true) => r.gate(CliffordGate::Y(q))?,
        (true, false) => r.gate(CliffordGate::Z(q))?,
        (false, true) => r.gate(CliffordGate::X(q))?,
        (false, false) => {}
    }
    let n = o1.len();
    debug_assert_eq!(r.o1, PauliString::single(n, q, Letter::X));
    debug_assert_eq!(r.o2, PauliString::single(n, q, Letter::Z));
    Ok((r.v, q))
}

/// Clifford `V` and qubits `p != q` with `V Z_p V† = O1` and `V Z_q V† = O2`
/// for commuting, distinct, non-identity `O1`, `O2`.
pub fn synthesize_commuting(
    o1: &PauliString,
    o2: &PauliString,
) -> Result<(CliffordCircuit, usize, usize)> {
    require_non_identity(o1, o2)?;
    if !o1.commutes(o2)? {
        return Err(ForgeError::ContractViolation(format!(
            "{o1} and {o2} anticommute; expected a commuting pair"
        )));
    }
    if o1.same_letters(o2) {
        return Err(ForgeError::ContractViolation(format!(
            "{o1} and {o2} are equal up to sign"
        )));
    }
    let mut r = Reduction::new(o1, o2);
    r.apply(&standard_form(o1, o2)?.0)?;
    let a = r.partition()?.a;
    for pair in a.chunks(2) {
        let (i, j) = (pair[0], pair[1]);
        r.gate(CliffordGate::Cnot(i, j))?;
        r.gate(CliffordGate::Cnot(j, i))?;
        r.gate(CliffordGate::H(i))?;
    }
    loop {
        let part = r.partition()?;
        let step = match (&part.b[..], &part.c[..], &part.d[..]) {
            ([b, ..], _, [d, ..]) => CliffordGate::Cnot(*d, *b),
            (_, [c, ..], [d, ..]) => CliffordGate::Cnot(*d, *c),
            ([b0, b1, ..], _, _) => CliffordGate::Cnot(*b1, *b0),
            (_, [c0, c1, ..], _) => CliffordGate::Cnot(*c1, *c0),
            _ => break,
        };
        r.gate(step)?;
    }
    let part = r.partition()?;
    let (p, q) = (part.b[0], part.c[0]);
    if r.o1.is_negative() {
        r.gate(CliffordGate::X(p))?;
    }
    if r.o2.is_negative() {
        r.gate(CliffordGate::X(q))?;
    }
    let n = o1.len();
    debug_assert_eq!(r.o1, PauliString::single(n, p, Letter::Z));
    debug_assert_eq!(r.o2, PauliString::single(n, q, Letter::Z));
    Ok((r.v, p, q))
}

/// One `a_j C_j*⊗C_j` term. `symbolic` spells `C_j` as a real combination
/// of signed Pauli strings; `circuit` realizes it exactly up to global phase.
#[derive(Debug, Clone, PartialEq)]
pub struct HeisenbergTerm {
    pub coeff: f64,
    pub circuit: CliffordCircuit,
    pub symbolic: Vec<(f64, PauliString)>,
}

/// `O1⊗O2 + O2⊗O1 = a0/2 ({O1,O2}⊗I + I⊗{O1,O2}) + Σ_j a_j C_j*⊗C_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeisenbergDecomposition {
    pub o1: PauliString,
    pub o2: PauliString,
    /// `(-1)^{y_count}`, shared by both observables.
    pub sigma: f64,
    pub a0: f64,
    pub terms: Vec<HeisenbergTerm>,
}

impl HeisenbergDecomposition {
    /// `O1 O2` as a signed Hermitian string; only meaningful when `a0 != 0`.
    pub fn product(&self) -> Option<PauliString> {
        self.o1.hermitian_product(&self.o2).ok()
    }

    pub fn max_cnot_count(&self) -> usize {
        self.terms.iter().map(|t| t.circuit.cnot_count()).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum HeisenbergForm {
    /// Y-counts of different parity: the expectation on a real state is zero.
    Vanishing,
    Terms(HeisenbergDecomposition),
}

impl HeisenbergForm {
    pub fn terms(&self) -> Option<&HeisenbergDecomposition> {
        match self {
            HeisenbergForm::Vanishing => None,
            HeisenbergForm::Terms(d) => Some(d),
        }
    }
}

fn sandwich(v: &CliffordCircuit, middle: &[CliffordGate]) -> Result<CliffordCircuit> {
    let m = CliffordCircuit::from_gates(v.n_qubits(), middle.to_vec())?;
    Ok(v.inverse().then(&m).then(v))
}

/// Build the `C*⊗C` decomposition for non-identity Pauli observables.
pub fn heisenberg_decompose(o1: &PauliString, o2: &PauliString) -> Result<HeisenbergForm> {
    require_non_identity(o1, o2)?;
    if o1.y_count() % 2 != o2.y_count() % 2 {
        return Ok(HeisenbergForm::Vanishing);
    }
    let sigma = o1.conjugation_sign();
    let n = o1.len();
    let (a0, terms) = if o1.same_letters(o2) {
        let mut circuit = CliffordCircuit::new(n);
        for q in 0..n {
            match o1.letter(q) {
                Letter::X => circuit.push(CliffordGate::X(q))?,
                Letter::Y => circuit.push(CliffordGate::Y(q))?,
                Letter::Z => circuit.push(CliffordGate::Z(q))?,
                Letter::I => {}
            }
        }
        // O1⊗O2 + O2⊗O1 = 2 s O1⊗O1 with s the relative sign.
        let s = o1.sign() * o2.sign();
        let term = HeisenbergTerm {
            coeff: s * sigma,
            circuit,
            symbolic: vec![(1.0, o1.unsigned())],
        };
        (0.0, vec![term.clone(), term])
    } else if !o1.commutes(o2)? {
        let (v, q) = synthesize_anticommuting(o1, o2)?;
        let c1 = sandwich(&v, &[CliffordGate::H(q)])?;
        let c2 = sandwich(&v, &[CliffordGate::X(q), CliffordGate::H(q), CliffordGate::X(q)])?;
        let r = FRAC_1_SQRT_2;
        (
            0.0,
            vec![
                HeisenbergTerm {
                    coeff: sigma,
                    circuit: c1,
                    symbolic: vec![(r, *o1), (r, *o2)],
                },
                HeisenbergTerm {
                    coeff: -sigma,
                    circuit: c2,
                    symbolic: vec![(r, *o1), (-r, *o2)],
                },
            ],
        )
    } else {
        let (v, p, q) = synthesize_commuting(o1, o2)?;
        let prod = o1.hermitian_product(o2)?;
        let mut terms = Vec::with_capacity(4);
        for (alpha, beta) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let mut flips = Vec::new();
            if alpha == 1 {
                flips.push(CliffordGate::X(p));
            }
            if beta == 1 {
                flips.push(CliffordGate::X(q));
            }
            let mut middle = flips.clone();
            middle.push(CliffordGate::Cz(p, q));
            middle.extend(flips);
            let sa = if alpha == 1 { -1.0 } else { 1.0 };
            let sb = if beta == 1 { -1.0 } else { 1.0 };
            terms.push(HeisenbergTerm {
                coeff: sigma * sa * sb,
                circuit: sandwich(&v, &middle)?,
                symbolic: vec![
                    (0.5, PauliString::identity(n)),
                    (0.5 * sa, *o1),
                    (0.5 * sb, *o2),
                    (-0.5 * sa * sb, prod),
                ],
            });
        }
        (sigma, terms)
    };
    Ok(HeisenbergForm::Terms(HeisenbergDecomposition {
        o1: *o1,
        o2: *o2,
        sigma,
        a0,
        terms,
    }))
}
