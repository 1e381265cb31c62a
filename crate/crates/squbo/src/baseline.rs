//! Box-constrained linear relaxation baseline.
//!
//! Relaxes spins to the box `[-1, 1]^n`, minimizes the continuous objective
//! `g(s) = -(1/2) * s^T q s` by projected gradient descent, and rounds the
//! result back to spins by sign.

use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::SquboError;
use crate::instance::{energy, SpinAssignment, SpinQuboInstance};
use crate::optimize::{derive_restart_seed, RestartFailure, SolveReport};

/// A restart stops once no coordinate moved by more than this in one update.
const MOVE_TOL: f64 = 1e-12;

/// Tuning knobs for [`lin_relax_solve`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinRelaxConfig {
    pub step_size: f64,
    pub max_iters: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for LinRelaxConfig {
    fn default() -> Self {
        Self { step_size: 0.1, max_iters: 2000, restarts: 16, seed: 0 }
    }
}

impl LinRelaxConfig {
    pub fn validate(&self) -> Result<(), SquboError> {
        if !self.step_size.is_finite() || self.step_size <= 0.0 {
            return Err(SquboError::InvalidArgument(
                "invalid baseline config: step_size must be positive".into(),
            ));
        }
        if self.max_iters == 0 || self.restarts == 0 {
            return Err(SquboError::InvalidArgument(
                "invalid baseline config: max_iters and restarts must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Rounds a relaxed vector to spins: `-1` where negative, `+1` otherwise.
pub fn threshold(s_lin: &[f64]) -> SpinAssignment {
    let spins = s_lin.iter().map(|&v| if v < 0.0 { -1 } else { 1 }).collect();
    SpinAssignment::new(spins).expect("spins are -1 or +1 by construction")
}

/// Continuous objective `-(1/2) * s^T q s` over the dense symmetric matrix,
/// evaluated from the canonical triples.
pub fn lin_objective(instance: &SpinQuboInstance, s: &[f64]) -> Result<f64, SquboError> {
    if s.len() != instance.n() {
        return Err(SquboError::DimensionMismatch { expected: instance.n(), actual: s.len() });
    }
    Ok(objective_raw(instance, s))
}

fn objective_raw(instance: &SpinQuboInstance, s: &[f64]) -> f64 {
    let mut acc = 0.0;
    for &(i, j, value) in instance.entries() {
        if i == j {
            acc += 0.5 * value * s[i] * s[i];
        } else {
            acc += value * s[i] * s[j];
        }
    }
    -acc
}

/// `(q s)_k`, the negated objective gradient.
fn matvec(instance: &SpinQuboInstance, s: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; s.len()];
    for &(i, j, value) in instance.entries() {
        if i == j {
            out[i] += value * s[i];
        } else {
            out[i] += value * s[j];
            out[j] += value * s[i];
        }
    }
    out
}

/// Projected gradient descent from `s0`, returning the final point and the
/// objective value at each iterate.
pub fn lin_descend(
    instance: &SpinQuboInstance,
    s0: &[f64],
    config: &LinRelaxConfig,
) -> Result<(Vec<f64>, Vec<f64>), SquboError> {
    config.validate()?;
    if s0.len() != instance.n() {
        return Err(SquboError::DimensionMismatch { expected: instance.n(), actual: s0.len() });
    }
    let mut s: Vec<f64> = s0.iter().map(|&v| v.clamp(-1.0, 1.0)).collect();
    let mut trace = Vec::new();
    for iteration in 0..config.max_iters {
        let obj = objective_raw(instance, &s);
        if !obj.is_finite() {
            return Err(SquboError::NumericalFailure {
                iteration,
                message: "non-finite objective".into(),
            });
        }
        trace.push(obj);
        let qs = matvec(instance, &s);
        let mut max_move = 0.0_f64;
        for (sk, qk) in s.iter_mut().zip(&qs) {
            // Descent on g(s) = -(1/2) s^T q s, whose gradient is -q s.
            let next = (*sk + config.step_size * qk).clamp(-1.0, 1.0);
            max_move = max_move.max((next - *sk).abs());
            *sk = next;
        }
        if max_move < MOVE_TOL {
            break;
        }
    }
    Ok((s, trace))
}

/// Multistart projected gradient descent with sign rounding. Restart
/// selection and reporting mirror the phase solver: lowest decoded energy
/// wins, ties broken by restart index, deterministic for a fixed seed.
pub fn lin_relax_solve(
    instance: &SpinQuboInstance,
    config: &LinRelaxConfig,
) -> Result<SolveReport<LinRelaxConfig>, SquboError> {
    config.validate()?;
    let started = Instant::now();

    struct RestartOutcome {
        restart: usize,
        assignment: SpinAssignment,
        energy: f64,
        objective: f64,
        saturation: f64,
        iterations: usize,
        s: Vec<f64>,
    }

    let outcomes: Vec<Result<RestartOutcome, RestartFailure>> = (0..config.restarts)
        .into_par_iter()
        .map(|restart| {
            let mut rng =
                ChaCha12Rng::seed_from_u64(derive_restart_seed(config.seed, restart as u64));
            let s0: Vec<f64> =
                (0..instance.n()).map(|_| rng.random_range(-1.0..=1.0)).collect();
            let run = || -> Result<RestartOutcome, SquboError> {
                let (s, trace) = lin_descend(instance, &s0, config)?;
                let objective = objective_raw(instance, &s);
                let assignment = threshold(&s);
                let energy = energy(instance, &assignment)?;
                // Mean |s_i| plays the role of saturation: 1 exactly when the
                // relaxed point is a corner of the box.
                let saturation = if s.is_empty() {
                    1.0
                } else {
                    s.iter().map(|v| v.abs()).sum::<f64>() / s.len() as f64
                };
                Ok(RestartOutcome {
                    restart,
                    assignment,
                    energy,
                    objective,
                    saturation,
                    iterations: trace.len(),
                    s,
                })
            };
            run().map_err(|e| RestartFailure { restart, message: e.to_string() })
        })
        .collect();

    let mut successes = Vec::new();
    let mut failed_restarts = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(o) => successes.push(o),
            Err(f) => failed_restarts.push(f),
        }
    }
    let Some(best) = successes
        .iter()
        .min_by(|a, b| a.energy.total_cmp(&b.energy).then(a.restart.cmp(&b.restart)))
    else {
        return Err(SquboError::AllRestartsFailed {
            restarts: config.restarts,
            first: failed_restarts
                .first()
                .map(|f| f.message.clone())
                .unwrap_or_else(|| "no restarts ran".into()),
        });
    };

    Ok(SolveReport {
        best_assignment: best.assignment.clone(),
        best_energy: best.energy,
        best_cost: best.objective,
        best_params: best.s.clone(),
        saturation: best.saturation,
        iterations_used: successes.iter().map(|o| o.iterations).collect(),
        restart_energies: successes.iter().map(|o| o.energy).collect(),
        restart_costs: successes.iter().map(|o| o.objective).collect(),
        failed_restarts,
        elapsed: started.elapsed(),
        config: config.clone(),
    })
}
