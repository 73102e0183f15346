use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use crate::bits::BitString;
use crate::error::{check_len, ForgeError, Result};
use crate::sim::{Angle, Circuit, Gate, Statevector};

fn check_pair(x: &BitString, y: &BitString) -> Result<()> {
    check_len(x.len(), y.len())?;
    if x == y {
        return Err(ForgeError::Input(format!(
            "superposition needs distinct bitstrings, got {x} twice"
        )));
    }
    Ok(())
}

/// X gates preparing `|b>` from `|0...0>`.
pub fn basis_prep_circuit(b: &BitString) -> Circuit {
    let mut c = Circuit::new(b.len());
    for q in b.ones() {
        c.push(Gate::X(q)).expect("bit index in range");
    }
    c
}

/// Circuit preparing `(|x> + i^p |y>)/√2` up to global phase.
///
/// The first differing qubit `k` is put in superposition (after swapping
/// `x` and `y` if `x_k = 1`, which maps `p -> -p`), then copied onto the
/// other differing qubits with CNOTs.
pub fn superposition_prep_circuit(x: &BitString, y: &BitString, p: u8) -> Result<Circuit> {
    check_pair(x, y)?;
    let diff = x.differing(y);
    let k = diff[0];
    let (x, p) = if x.bit(k) { (y, (4 - p % 4) % 4) } else { (x, p % 4) };
    let mut c = basis_prep_circuit(x);
    c.push(Gate::H(k))?;
    match p {
        1 => c.push(Gate::S(k))?,
        2 => c.push(Gate::Z(k))?,
        3 => {
            c.push(Gate::Z(k))?;
            c.push(Gate::S(k))?;
        }
        _ => {}
    }
    for &l in &diff[1..] {
        c.push(Gate::Cnot(k, l))?;
    }
    Ok(c)
}

/// Single-qubit factors of the product state `|ψ^p_xy>`: `|x_j>` where the
/// strings agree, `(|x_j> + e^{iπp/2d}|y_j>)/√2` where they differ.
/// Each factor is `[amp0, amp1]`.
pub fn product_prep_state(x: &BitString, y: &BitString, p: u32) -> Result<Vec<[Complex64; 2]>> {
    check_pair(x, y)?;
    let d = x.hamming_distance(y);
    if p >= 4 * d {
        return Err(ForgeError::Input(format!("phase index {p} outside 0..{}", 4 * d)));
    }
    let phase = Complex64::from_polar(FRAC_1_SQRT_2, PI * p as f64 / (2.0 * d as f64));
    let r = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    Ok((0..x.len())
        .map(|j| match (x.bit(j), y.bit(j)) {
            (false, false) => [one, zero],
            (true, true) => [zero, one],
            (false, true) => [r, phase],
            (true, false) => [phase, r],
        })
        .collect())
}

/// Statevector of the product state `|ψ^p_xy>`.
pub fn product_statevector(x: &BitString, y: &BitString, p: u32) -> Result<Statevector> {
    let factors = product_prep_state(x, y, p)?;
    let mut state = Statevector::from_amplitudes(factors[0].to_vec())?;
    for f in &factors[1..] {
        state = state.tensor(&Statevector::from_amplitudes(f.to_vec())?);
    }
    Ok(state)
}

/// H, X and Z-rotation circuit preparing `|ψ^p_xy>` up to global phase.
pub fn product_prep_circuit(x: &BitString, y: &BitString, p: u32) -> Result<Circuit> {
    check_pair(x, y)?;
    let d = x.hamming_distance(y);
    if p >= 4 * d {
        return Err(ForgeError::Input(format!("phase index {p} outside 0..{}", 4 * d)));
    }
    let theta = PI * p as f64 / (2.0 * d as f64);
    let mut c = Circuit::new(x.len());
    for j in 0..x.len() {
        match (x.bit(j), y.bit(j)) {
            (false, false) => {}
            (true, true) => c.push(Gate::X(j))?,
            (xj, _) => {
                c.push(Gate::H(j))?;
                if p > 0 {
                    let angle = if xj { -theta } else { theta };
                    c.push(Gate::Rz(j, Angle::Fixed(angle)))?;
                }
            }
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn superposition(x: &BitString, y: &BitString, p: u8) -> Statevector {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << x.len()];
        amps[x.index()] += FRAC_1_SQRT_2;
        amps[y.index()] += Complex64::i().powu(p as u32) * FRAC_1_SQRT_2;
        Statevector::from_amplitudes(amps).unwrap()
    }

    fn overlap(a: &Statevector, c: &Circuit) -> f64 {
        let s = Statevector::zero(c.n_qubits()).evolved(c).unwrap();
        a.inner(&s).unwrap().norm()
    }

    #[test]
    fn single_qubit_plus() {
        let c = superposition_prep_circuit(&b("0"), &b("1"), 0).unwrap();
        assert_eq!(c.gates(), &[Gate::H(0)]);
    }

    #[test]
    fn superposition_examples() {
        for (x, y, p) in [("00", "11", 2), ("11100", "01101", 0), ("10", "01", 1), ("110", "011", 3)] {
            let (x, y) = (b(x), b(y));
            let c = superposition_prep_circuit(&x, &y, p).unwrap();
            assert!((overlap(&superposition(&x, &y, p), &c) - 1.0).abs() < 1e-12, "{x} {y} {p}");
        }
        assert!(superposition_prep_circuit(&b("01"), &b("01"), 0).is_err());
    }

    #[test]
    fn superposition_exhaustive_three_qubits() {
        for xv in 0..8u64 {
            for yv in 0..8u64 {
                if xv == yv {
                    continue;
                }
                let (x, y) = (BitString::new(3, xv).unwrap(), BitString::new(3, yv).unwrap());
                for p in 0..4 {
                    let c = superposition_prep_circuit(&x, &y, p).unwrap();
                    assert!((overlap(&superposition(&x, &y, p), &c) - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn product_examples() {
        let f = product_prep_state(&b("0"), &b("1"), 0).unwrap();
        assert!((f[0][0] - FRAC_1_SQRT_2).norm() < 1e-15 && (f[0][1] - FRAC_1_SQRT_2).norm() < 1e-15);
        let f = product_prep_state(&b("00"), &b("11"), 1).unwrap();
        let want = Complex64::from_polar(FRAC_1_SQRT_2, PI / 4.0);
        assert!(f.iter().all(|q| (q[1] - want).norm() < 1e-15));
        assert!(product_prep_state(&b("00"), &b("11"), 8).is_err());
    }

    #[test]
    fn product_circuit_matches_state() {
        for (x, y) in [("010", "101"), ("110", "100"), ("0011", "1010")] {
            let (x, y) = (b(x), b(y));
            for p in 0..4 * x.hamming_distance(&y) {
                let s = product_statevector(&x, &y, p).unwrap();
                let c = product_prep_circuit(&x, &y, p).unwrap();
                assert!((overlap(&s, &c) - 1.0).abs() < 1e-12);
            }
        }
    }
}
