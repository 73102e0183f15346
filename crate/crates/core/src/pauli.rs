//! Signed Pauli strings.
//!
//! A string is stored in symplectic form: bit `j` of `x` and `z` encodes the
//! letter on qubit `j` as I=(0,0), X=(1,0), Y=(1,1), Z=(0,1). The letter `Y`
//! is the Hermitian Pauli Y, so as an operator the string equals
//! `sign * i^(#Y) * X^x Z^z` with the Z factor acting first on each qubit.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{check_len, ForgeError, Result};

/// Maximum register size for a [`PauliString`].
pub const MAX_QUBITS: usize = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'I' => Some(Letter::I),
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            'Z' => Some(Letter::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Letter {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    len: usize,
    x: u64,
    z: u64,
    negative: bool,
}

/// Power of `i` in `{0,1,2,3}`.
pub type Phase = u8;

pub fn phase_value(phase: Phase) -> Complex64 {
    match phase % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl PauliString {
    pub fn identity(len: usize) -> Self {
        assert!(len <= MAX_QUBITS);
        Self {
            len,
            x: 0,
            z: 0,
            negative: false,
        }
    }

    pub fn from_letters(letters: &[Letter]) -> Self {
        assert!(letters.len() <= MAX_QUBITS);
        let mut p = PauliString::identity(letters.len());
        for (j, &l) in letters.iter().enumerate() {
            p.set(j, l);
        }
        p
    }

    /// Single-letter string on qubit `qubit` of an `len`-qubit register.
    pub fn single(len: usize, qubit: usize, letter: Letter) -> Self {
        let mut p = PauliString::identity(len);
        p.set(qubit, letter);
        p
    }

    pub(crate) fn from_masks(len: usize, x: u64, z: u64, negative: bool) -> Self {
        Self { len, x, z, negative }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    /// `+1.0` or `-1.0`.
    pub fn sign(&self) -> f64 {
        if self.negative {
            -1.0
        } else {
            1.0
        }
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn with_sign(mut self, negative: bool) -> Self {
        self.negative = negative;
        self
    }

    pub fn negated(mut self) -> Self {
        self.negative = !self.negative;
        self
    }

    /// Same letters with a `+` sign.
    pub fn unsigned(self) -> Self {
        self.with_sign(false)
    }

    pub fn letter(&self, qubit: usize) -> Letter {
        Letter::from_bits((self.x >> qubit) & 1 == 1, (self.z >> qubit) & 1 == 1)
    }

    pub fn letters(&self) -> Vec<Letter> {
        (0..self.len).map(|j| self.letter(j)).collect()
    }

    pub fn set(&mut self, qubit: usize, letter: Letter) {
        assert!(qubit < self.len, "qubit {qubit} out of range {}", self.len);
        let (xb, zb) = letter.bits();
        let bit = 1u64 << qubit;
        self.x = (self.x & !bit) | if xb { bit } else { 0 };
        self.z = (self.z & !bit) | if zb { bit } else { 0 };
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// `(-1)^{#Y}`: the string's complex conjugate equals this times the string.
    pub fn conjugation_sign(&self) -> f64 {
        if self.y_count().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    /// Same letters, ignoring sign.
    pub fn same_letters(&self, other: &PauliString) -> bool {
        self.len == other.len && self.x == other.x && self.z == other.z
    }

    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        check_len(self.len, other.len)?;
        let anti = (self.x & other.z) ^ (self.z & other.x);
        Ok(anti.count_ones().is_multiple_of(2))
    }

    /// Operator product `self * other = i^phase * result`, where `result`
    /// carries a `+` sign and both input signs are folded into the phase.
    pub fn product(&self, other: &PauliString) -> Result<(Phase, PauliString)> {
        check_len(self.len, other.len)?;
        let mut phase: u32 = 0;
        for j in 0..self.len {
            phase += letter_product_phase(self.letter(j), other.letter(j)) as u32;
        }
        if self.negative {
            phase += 2;
        }
        if other.negative {
            phase += 2;
        }
        let result = PauliString {
            len: self.len,
            x: self.x ^ other.x,
            z: self.z ^ other.z,
            negative: false,
        };
        Ok(((phase % 4) as Phase, result))
    }

    /// Product of two commuting strings as a signed Hermitian string.
    pub fn hermitian_product(&self, other: &PauliString) -> Result<PauliString> {
        let (phase, p) = self.product(other)?;
        match phase {
            0 => Ok(p),
            2 => Ok(p.negated()),
            _ => Err(ForgeError::ContractViolation(format!(
                "{self} and {other} anticommute; their product is not Hermitian"
            ))),
        }
    }

    /// Concatenate two registers: `self` on the low qubits, `other` above it.
    pub fn tensor(&self, other: &PauliString) -> PauliString {
        assert!(self.len + other.len <= MAX_QUBITS);
        PauliString {
            len: self.len + other.len,
            x: self.x | (other.x << self.len),
            z: self.z | (other.z << self.len),
            negative: self.negative ^ other.negative,
        }
    }

    /// Split into the first `at` qubits and the remainder. The sign stays
    /// with the first factor.
    pub fn split(&self, at: usize) -> (PauliString, PauliString) {
        assert!(at <= self.len);
        let low = if at == 64 { u64::MAX } else { (1u64 << at) - 1 };
        let first = PauliString {
            len: at,
            x: self.x & low,
            z: self.z & low,
            negative: self.negative,
        };
        let second = PauliString {
            len: self.len - at,
            x: self.x >> at,
            z: self.z >> at,
            negative: false,
        };
        (first, second)
    }

    /// Eigenvalue of the Z-diagonalized string on a measured basis index:
    /// `sign * (-1)^{|outcome & support|}`.
    pub fn parity_eigenvalue(&self, outcome: usize) -> f64 {
        let parity = ((outcome as u64) & self.support()).count_ones() % 2;
        if (parity == 1) ^ self.negative {
            -1.0
        } else {
            1.0
        }
    }

    /// True when every position carries at most one non-identity letter kind
    /// across both strings.
    /// Phase `c` in `P|b> = c |b ⊕ x_mask>`.
    pub fn phase_on(&self, basis: u64) -> Complex64 {
        let flips = (self.z & basis).count_ones() % 2 == 1;
        let mut c = Complex64::i().powu(self.y_count() % 4) * self.sign();
        if flips {
            c = -c;
        }
        c
    }

    pub fn qubitwise_compatible(&self, other: &PauliString) -> bool {
        let both = self.support() & other.support();
        ((self.x ^ other.x) | (self.z ^ other.z)) & both == 0
    }
}

/// Phase exponent of `a * b` for single letters: e.g. `X * Y = i Z`.
fn letter_product_phase(a: Letter, b: Letter) -> u8 {
    use Letter::*;
    match (a, b) {
        (X, Y) | (Y, Z) | (Z, X) => 1,
        (Y, X) | (Z, Y) | (X, Z) => 3,
        _ => 0,
    }
}

/// Free-function form of [`PauliString::commutes`].
pub fn commutes(p: &PauliString, q: &PauliString) -> Result<bool> {
    p.commutes(q)
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.negative { "-" } else { "+" })?;
        for j in 0..self.len {
            write!(f, "{}", self.letter(j).as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = ForgeError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (negative, body) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            _ => (false, s),
        };
        if body.is_empty() {
            return Err(ForgeError::Input(format!("empty Pauli string `{s}`")));
        }
        if body.len() > MAX_QUBITS {
            return Err(ForgeError::Input(format!(
                "Pauli string longer than {MAX_QUBITS} qubits"
            )));
        }
        let letters = body
            .chars()
            .map(|c| {
                Letter::from_char(c).ok_or_else(|| {
                    ForgeError::Input(format!("invalid Pauli letter `{c}` in `{s}`"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliString::from_letters(&letters).with_sign(negative))
    }
}
