use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{ForgeError, Result};

/// Gain schedules `a_k = a/(k+1+A)^α` and `c_k = c/(k+1)^γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpsaConfig {
    pub iterations: usize,
    pub alpha: f64,
    pub gamma: f64,
    /// Stability constant; `None` means 10% of the iteration count.
    pub big_a: Option<f64>,
    pub c: f64,
    /// Step scale; `None` calibrates it so the first step has magnitude
    /// `target_step` on average over `calibration_probes` gradient probes.
    pub a: Option<f64>,
    pub target_step: f64,
    pub calibration_probes: usize,
}

impl SpsaConfig {
    pub fn new(iterations: usize) -> Self {
        Self {
            iterations,
            alpha: 0.602,
            gamma: 0.101,
            big_a: None,
            c: 0.1,
            a: None,
            target_step: 0.2,
            calibration_probes: 5,
        }
    }

    fn stability(&self) -> f64 {
        self.big_a.unwrap_or(0.1 * self.iterations as f64)
    }
}

/// One optimizer iteration: the objective at the current point `θ_k`,
/// evaluated before stepping.
#[derive(Debug, Clone, PartialEq)]
pub struct SpsaStep<T> {
    pub iteration: usize,
    pub theta: Vec<f64>,
    pub value: f64,
    pub info: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpsaRun<T> {
    pub steps: Vec<SpsaStep<T>>,
    /// Index into `steps` of the lowest value seen.
    pub best: Option<usize>,
    /// Calibrated or configured step scale.
    pub a: f64,
    /// Set when the run stopped early.
    pub aborted: Option<ForgeError>,
}

impl<T> SpsaRun<T> {
    pub fn best_step(&self) -> Option<&SpsaStep<T>> {
        self.best.map(|i| &self.steps[i])
    }
}

fn perturbation<R: Rng>(rng: &mut R, m: usize) -> Vec<f64> {
    (0..m).map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 }).collect()
}

fn shifted(theta: &[f64], delta: &[f64], scale: f64) -> Vec<f64> {
    theta.iter().zip(delta).map(|(t, d)| t + scale * d).collect()
}

fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ForgeError::NonFinite(format!("objective returned {v} at {what}")))
    }
}

/// Minimize `objective` from `theta0`. Each iteration evaluates the current
/// point and the two perturbed points `θ ± c_k Δ`; everything depends only on
/// `seed`. An error or non-finite value stops the run and is returned in
/// [`SpsaRun::aborted`] alongside the steps completed so far.
pub fn spsa_optimize<T, F>(mut objective: F, theta0: &[f64], config: &SpsaConfig, seed: u64) -> Result<SpsaRun<T>>
where
    F: FnMut(&[f64]) -> Result<(f64, T)>,
{
    if config.iterations == 0 {
        return Err(ForgeError::Input("SPSA needs at least one iteration".into()));
    }
    if !(config.c > 0.0 && config.target_step > 0.0) {
        return Err(ForgeError::Input("SPSA gains must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let big_a = config.stability();
    let mut run = SpsaRun {
        steps: Vec::with_capacity(config.iterations),
        best: None,
        a: 0.0,
        aborted: None,
    };
    let mut eval = |theta: &[f64], what: &str| -> Result<(f64, T)> {
        let (v, info) = objective(theta)?;
        Ok((finite(v, what)?, info))
    };

    run.a = match config.a {
        Some(a) => a,
        None => {
            let mut total = 0.0;
            let probes = config.calibration_probes.max(1);
            for _ in 0..probes {
                let delta = perturbation(&mut rng, theta0.len());
                let plus = eval(&shifted(theta0, &delta, config.c), "calibration");
                let minus = eval(&shifted(theta0, &delta, -config.c), "calibration");
                match (plus, minus) {
                    (Ok((p, _)), Ok((m, _))) => total += (p - m).abs() / (2.0 * config.c),
                    (Err(e), _) | (_, Err(e)) => {
                        run.aborted = Some(e);
                        return Ok(run);
                    }
                }
            }
            let mean = total / probes as f64;
            let scale = config.target_step * (big_a + 1.0).powf(config.alpha);
            if mean > 0.0 {
                scale / mean
            } else {
                scale
            }
        }
    };

    let mut theta = theta0.to_vec();
    for k in 0..config.iterations {
        let (value, info) = match eval(&theta, "current point") {
            Ok(r) => r,
            Err(e) => {
                run.aborted = Some(e);
                break;
            }
        };
        if run.best.is_none_or(|b| value < run.steps[b].value) {
            run.best = Some(run.steps.len());
        }
        run.steps.push(SpsaStep {
            iteration: k,
            theta: theta.clone(),
            value,
            info,
        });
        if k + 1 == config.iterations {
            break;
        }
        let ak = run.a / (k as f64 + 1.0 + big_a).powf(config.alpha);
        let ck = config.c / (k as f64 + 1.0).powf(config.gamma);
        let delta = perturbation(&mut rng, theta.len());
        let grad = match (eval(&shifted(&theta, &delta, ck), "θ+"), eval(&shifted(&theta, &delta, -ck), "θ-")) {
            (Ok((p, _)), Ok((m, _))) => (p - m) / (2.0 * ck),
            (Err(e), _) | (_, Err(e)) => {
                run.aborted = Some(e);
                break;
            }
        };
        for (t, d) in theta.iter_mut().zip(&delta) {
            *t -= ak * grad * d;
        }
    }
    Ok(run)
}
