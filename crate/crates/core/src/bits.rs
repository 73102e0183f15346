//! Computational-basis labels.
//!
//! Qubit `j` (zero-based) is bit `j` of the basis index, and in text the
//! leftmost character is qubit 0. So `"100"` on three qubits is index 1.

use std::fmt;
use std::str::FromStr;

use crate::error::{ForgeError, Result};

/// An `len`-bit computational basis label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    len: usize,
    value: u64,
}

impl BitString {
    pub fn new(len: usize, value: u64) -> Result<Self> {
        if len > 63 {
            return Err(ForgeError::Input(format!(
                "bitstrings longer than 63 bits are unsupported (got {len})"
            )));
        }
        if len < 64 && value >> len != 0 {
            return Err(ForgeError::Input(format!(
                "value {value} does not fit in {len} bits"
            )));
        }
        Ok(Self { len, value })
    }

    pub fn zeros(len: usize) -> Self {
        Self { len, value: 0 }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let value = bits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (j, &b)| acc | ((b as u64) << j));
        Self {
            len: bits.len(),
            value,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Basis index of this label.
    pub fn index(&self) -> usize {
        self.value as usize
    }

    pub fn bit(&self, qubit: usize) -> bool {
        (self.value >> qubit) & 1 == 1
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&j| self.bit(j))
    }

    pub fn hamming_weight(&self) -> u32 {
        self.value.count_ones()
    }

    pub fn hamming_distance(&self, other: &BitString) -> u32 {
        (self.value ^ other.value).count_ones()
    }

    /// Positions where the two labels differ, ascending.
    pub fn differing(&self, other: &BitString) -> Vec<usize> {
        let diff = self.value ^ other.value;
        (0..self.len.max(other.len))
            .filter(|&j| (diff >> j) & 1 == 1)
            .collect()
    }

    /// Remove the given positions, compacting the remaining bits in order.
    pub fn without_positions(&self, removed: &[usize]) -> BitString {
        let kept: Vec<bool> = (0..self.len)
            .filter(|j| !removed.contains(j))
            .map(|j| self.bit(j))
            .collect();
        BitString::from_bits(&kept)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.len {
            f.write_str(if self.bit(j) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = ForgeError;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(ForgeError::Input("empty bitstring".into()));
        }
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(ForgeError::Input(format!(
                    "invalid bitstring character `{other}` in `{s}`"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        if bits.len() > 63 {
            return Err(ForgeError::Input(format!("bitstring `{s}` is too long")));
        }
        Ok(BitString::from_bits(&bits))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leftmost_character_is_qubit_zero() {
        let b: BitString = "100".parse().unwrap();
        assert_eq!(b.index(), 1);
        assert!(b.bit(0));
        assert_eq!(b.to_string(), "100");
        let b: BitString = "001".parse().unwrap();
        assert_eq!(b.index(), 4);
    }

    #[test]
    fn differing_positions() {
        let x: BitString = "11100".parse().unwrap();
        let y: BitString = "01101".parse().unwrap();
        assert_eq!(x.differing(&y), vec![0, 4]);
        assert_eq!(x.hamming_distance(&y), 2);
    }

    #[test]
    fn frozen_positions_are_removed() {
        let b: BitString = "1111100".parse().unwrap();
        assert_eq!(b.without_positions(&[0, 4]).to_string(), "11100");
        let b: BitString = "1011101".parse().unwrap();
        assert_eq!(b.without_positions(&[0, 4]).to_string(), "01101");
    }

    #[test]
    fn rejects_garbage() {
        assert!("10a".parse::<BitString>().is_err());
        assert!("".parse::<BitString>().is_err());
        assert!(BitString::new(2, 4).is_err());
    }
}
