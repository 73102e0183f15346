use rand::seq::index::sample_weighted;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{ForgeError, Result};

/// Approximate the shot fractions `weights` with integer copy counts in a job
/// of `job_size` circuits.
///
/// Every circuit gets one copy plus `max(0, floor(w·J − 1))`. Leftover slots
/// go to distinct circuits drawn without replacement with probability
/// proportional to their shortfall `w·J − count`.
pub fn copysample(weights: &[f64], job_size: usize, seed: u64) -> Result<Vec<usize>> {
    if weights.is_empty() {
        return Err(ForgeError::Input("no circuits to allocate".into()));
    }
    if job_size < weights.len() {
        return Err(ForgeError::Input(format!(
            "job size {job_size} is smaller than the {} circuits",
            weights.len()
        )));
    }
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(ForgeError::Input("weights must be finite and non-negative".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(ForgeError::Input(format!("weights sum to {total}, not 1")));
    }
    let j = job_size as f64;
    let mut counts: Vec<usize> = weights
        .iter()
        .map(|w| 1 + (w * j - 1.0).floor().max(0.0) as usize)
        .collect();
    // The one-copy floors of tiny weights can overshoot J: take surplus back
    // from the most over-allocated circuits that still have a spare copy.
    let mut used: usize = counts.iter().sum();
    while used > job_size {
        let i = (0..counts.len())
            .filter(|&i| counts[i] > 1)
            .max_by(|&a, &b| {
                let excess = |i: usize| counts[i] as f64 - weights[i] * j;
                excess(a).total_cmp(&excess(b))
            })
            .expect("J >= circuit count leaves a spare copy somewhere");
        counts[i] -= 1;
        used -= 1;
    }
    let mut remaining = job_size - used;
    if remaining > 0 {
        let shortfall: Vec<f64> = weights
            .iter()
            .zip(&counts)
            .map(|(w, &c)| (w * j - c as f64).max(0.0))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let picked = sample_weighted(&mut rng, weights.len(), |i| shortfall[i], remaining)
            .map_err(|e| ForgeError::Input(format!("residual sampling failed: {e}")))?;
        for i in picked.iter() {
            counts[i] += 1;
            remaining -= 1;
        }
        // Only reachable through round-off: hand out what is left by weight.
        let mut order: Vec<usize> = (0..weights.len()).collect();
        order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]));
        for &i in order.iter().cycle().take(remaining) {
            counts[i] += 1;
        }
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(copysample(&[0.5, 0.3, 0.2], 10, 0).unwrap(), vec![5, 3, 2]);
        assert_eq!(copysample(&[0.25; 4], 8, 0).unwrap(), vec![2, 2, 2, 2]);
        assert_eq!(copysample(&[0.9, 0.1], 2, 0).unwrap(), vec![1, 1]);
    }

    #[test]
    fn errors() {
        assert!(copysample(&[0.5, 0.5], 1, 0).is_err());
        assert!(copysample(&[0.5, 0.4], 10, 0).is_err());
        assert!(copysample(&[], 10, 0).is_err());
    }
}
