use crate::error::{ForgeError, Result};
use crate::sim::Statevector;

/// Schmidt coefficients of an even-sized register split into equal halves,
/// sorted in decreasing order.
pub fn schmidt_spectrum(state: &Statevector) -> Result<Vec<f64>> {
    let total = state.n_qubits();
    if total % 2 == 1 {
        return Err(ForgeError::Input(format!(
            "Schmidt spectrum needs an even qubit count, got {total}"
        )));
    }
    let m = state.bipartite_matrix(total / 2);
    let mut values: Vec<f64> = m.singular_values().iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// Weight left out by keeping the leading `k` coefficients:
/// `1 - Σ_{n<k} λ_n²`, clamped at zero.
pub fn truncation_residual(lambdas: &[f64], k: usize) -> f64 {
    let kept: f64 = lambdas.iter().take(k).map(|l| l * l).sum();
    (1.0 - kept).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::Circuit;

    #[test]
    fn product_and_bell() {
        let product = Statevector::zero(4)
            .evolved(&Circuit::parse(4, "H 0\nRY 3 0.4").unwrap())
            .unwrap();
        let s = schmidt_spectrum(&product).unwrap();
        assert!((s[0] - 1.0).abs() < 1e-12);
        assert!(s[1..].iter().all(|v| v.abs() < 1e-12));

        let bell = Statevector::zero(2)
            .evolved(&Circuit::parse(2, "H 0\nCNOT 0 1").unwrap())
            .unwrap();
        let s = schmidt_spectrum(&bell).unwrap();
        assert!((s[0] - s[1]).abs() < 1e-12 && (s[0] - 0.5f64.sqrt()).abs() < 1e-12);

        assert!(schmidt_spectrum(&Statevector::zero(3)).is_err());
    }

    #[test]
    fn residual_examples() {
        assert_eq!(truncation_residual(&[1.0], 1), 0.0);
        assert!((truncation_residual(&[0.8, 0.6], 1) - 0.36).abs() < 1e-15);
        assert_eq!(truncation_residual(&[0.8, 0.6], 0), 1.0);
    }
}
