use crate::error::{ForgeError, Result};
use crate::pauli::PauliString;
use crate::sim::{basis_rotation, sample_noisy, Circuit, NoiseModel};

/// Least-squares line through `(stretch, estimate)` points, evaluated at zero
/// stretch.
pub fn zne_extrapolate(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(ForgeError::Input("extrapolation needs at least two points".into()));
    }
    for (i, a) in points.iter().enumerate() {
        if points[..i].iter().any(|b| b.0 == a.0) {
            return Err(ForgeError::Input(format!("duplicate stretch factor {}", a.0)));
        }
    }
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(my - sxy / sxx * mx)
}

/// Stretch factors (odd, containing 1) with relative shot weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ZneSchedule {
    factors: Vec<u32>,
    weights: Vec<f64>,
}

impl Default for ZneSchedule {
    fn default() -> Self {
        Self {
            factors: vec![1, 3],
            weights: vec![2.0, 1.0],
        }
    }
}

impl ZneSchedule {
    pub fn new(factors: Vec<u32>, weights: Vec<f64>) -> Result<Self> {
        if factors.len() != weights.len() {
            return Err(ForgeError::LengthMismatch {
                expected: factors.len(),
                found: weights.len(),
            });
        }
        if !factors.contains(&1) {
            return Err(ForgeError::Input("stretch factor 1 must be present".into()));
        }
        if let Some(f) = factors.iter().find(|f| *f % 2 == 0) {
            return Err(ForgeError::Input(format!("stretch factor {f} is not a positive odd integer")));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(ForgeError::Input("stretch weights must be positive".into()));
        }
        let mut sorted = factors.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != factors.len() {
            return Err(ForgeError::Input("duplicate stretch factors".into()));
        }
        Ok(Self { factors, weights })
    }

    pub fn factors(&self) -> &[u32] {
        &self.factors
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Split `total` shots by weight, at least one per factor.
    pub fn allocate_shots(&self, total: u64) -> Vec<u64> {
        let sum: f64 = self.weights.iter().sum();
        self.weights
            .iter()
            .map(|w| ((total as f64 * w / sum).round() as u64).max(1))
            .collect()
    }
}

/// Replace every gate `G` by `G (G⁻¹ G)^k` with `factor = 2k + 1`.
pub fn fold(circuit: &Circuit, factor: u32) -> Result<Circuit> {
    if factor.is_multiple_of(2) {
        return Err(ForgeError::Input(format!("stretch factor {factor} is not a positive odd integer")));
    }
    let mut out = Circuit::new(circuit.n_qubits());
    for g in circuit.gates() {
        out.push(g.clone())?;
        for _ in 0..factor / 2 {
            out.push(g.inverse())?;
            out.push(g.clone())?;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZneResult {
    /// Extrapolated value.
    pub value: f64,
    /// `(stretch, estimate)` for every factor in the schedule.
    pub points: Vec<(f64, f64)>,
}

impl ZneResult {
    /// The unmitigated estimate at stretch 1.
    pub fn unmitigated(&self) -> f64 {
        self.points.iter().find(|p| p.0 == 1.0).expect("factor 1 always present").1
    }
}

/// Estimate `<observable>` after `prep` under `noise` at each stretch factor
/// and extrapolate. Measurement rotations are not folded.
pub fn zne_estimate(
    prep: &Circuit,
    observable: &PauliString,
    noise: &NoiseModel,
    schedule: &ZneSchedule,
    total_shots: u64,
    seed: u64,
) -> Result<ZneResult> {
    let rotation = basis_rotation(observable);
    let shots = schedule.allocate_shots(total_shots);
    let mut points = Vec::with_capacity(shots.len());
    for (i, (&f, &s)) in schedule.factors().iter().zip(&shots).enumerate() {
        let circuit = fold(prep, f)?.then(&rotation)?;
        let counts = sample_noisy(&circuit, noise, s, seed.wrapping_add(i as u64))?;
        points.push((f as f64, counts.parity_mean(observable)));
    }
    Ok(ZneResult {
        value: zne_extrapolate(&points)?,
        points,
    })
}
