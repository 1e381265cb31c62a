//! Multistart perturbed gradient descent over phase parameters.

use std::time::{Duration, Instant};

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::SquboError;
use crate::instance::{energy, SpinAssignment, SpinQuboInstance};
use crate::phase::{
    cost_from_values, gradient_from_values, profile_values, saturation_from_values, PhaseParams,
    PhaseProfile,
};

/// Tuning knobs for [`solve`] and [`descend`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Initial gradient step, decayed multiplicatively each iteration.
    pub step_size: f64,
    pub step_decay: f64,
    /// Initial standard deviation of the additive Gaussian kick, decayed
    /// multiplicatively each iteration.
    pub noise_sigma: f64,
    pub noise_decay: f64,
    pub max_iters: usize,
    pub restarts: usize,
    /// Initial parameters are drawn uniformly from this interval around zero.
    pub init_half_width: f64,
    /// A restart stops early once the gradient infinity norm and the current
    /// noise level both fall below this.
    pub grad_tol: f64,
    pub seed: u64,
}

impl OptimizerConfig {
    /// Defaults with the initialization interval adapted to the profile's
    /// transition width.
    pub fn for_profile(profile: PhaseProfile) -> Self {
        Self {
            step_size: 0.1,
            step_decay: 0.999,
            noise_sigma: 0.5,
            noise_decay: 0.995,
            max_iters: 2000,
            restarts: 16,
            init_half_width: profile.default_init_half_width(),
            grad_tol: 1e-6,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), SquboError> {
        let check = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(SquboError::InvalidArgument(format!("invalid optimizer config: {what}")))
            }
        };
        check(self.step_size.is_finite() && self.step_size > 0.0, "step_size must be positive")?;
        check(
            self.step_decay.is_finite() && self.step_decay > 0.0 && self.step_decay <= 1.0,
            "step_decay must lie in (0, 1]",
        )?;
        check(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0, "noise_sigma must be non-negative")?;
        check(
            self.noise_decay.is_finite() && self.noise_decay > 0.0 && self.noise_decay <= 1.0,
            "noise_decay must lie in (0, 1]",
        )?;
        check(self.max_iters >= 1, "max_iters must be at least 1")?;
        check(self.restarts >= 1, "restarts must be at least 1")?;
        check(
            self.init_half_width.is_finite() && self.init_half_width > 0.0,
            "init_half_width must be positive",
        )?;
        check(self.grad_tol.is_finite() && self.grad_tol >= 0.0, "grad_tol must be non-negative")?;
        Ok(())
    }
}

/// Per-iteration measurements recorded by [`descend`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub cost: f64,
    pub grad_norm_inf: f64,
    pub saturation: f64,
}

/// One failed restart of a multistart run.
#[derive(Debug, Clone)]
pub struct RestartFailure {
    pub restart: usize,
    pub message: String,
}

/// Outcome of a multistart run.
///
/// `iterations_used`, `restart_energies`, and `restart_costs` are aligned and
/// ordered by restart index over the successful restarts; failed restarts are
/// reported separately.
#[derive(Debug, Clone)]
pub struct SolveReport<C> {
    pub best_assignment: SpinAssignment,
    pub best_energy: f64,
    /// Continuous cost at the winning restart's final parameters.
    pub best_cost: f64,
    /// Final continuous parameters of the winning restart.
    pub best_params: Vec<f64>,
    pub saturation: f64,
    pub iterations_used: Vec<usize>,
    pub restart_energies: Vec<f64>,
    pub restart_costs: Vec<f64>,
    pub failed_restarts: Vec<RestartFailure>,
    pub elapsed: Duration,
    pub config: C,
}

/// Splits a base seed into a stream seed for one restart. Distinct restarts
/// get decorrelated streams; the map is pure so runs are reproducible under
/// any parallel schedule.
pub fn derive_restart_seed(seed: u64, restart: u64) -> u64 {
    let mut z = seed ^ restart.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Perturbed gradient descent from a given starting point.
///
/// Each iteration records the current cost, gradient norm, and saturation,
/// then takes a gradient step plus a Gaussian kick; step size and kick
/// magnitude decay multiplicatively. Stops early once the gradient norm and
/// the noise level both fall below `grad_tol`.
pub fn descend<R: Rng>(
    instance: &SpinQuboInstance,
    profile: PhaseProfile,
    theta0: &PhaseParams,
    config: &OptimizerConfig,
    rng: &mut R,
) -> Result<(PhaseParams, Vec<IterationRecord>), SquboError> {
    config.validate()?;
    if theta0.len() != instance.n() {
        return Err(SquboError::DimensionMismatch {
            expected: instance.n(),
            actual: theta0.len(),
        });
    }
    let mut theta = theta0.clone().into_vec();
    let mut step = config.step_size;
    let mut sigma = config.noise_sigma;
    let mut trace = Vec::new();

    for iteration in 0..config.max_iters {
        let r = profile_values(profile, &theta);
        let cost = cost_from_values(instance, &r);
        let grad = gradient_from_values(instance, profile, &theta, &r);
        if !cost.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(SquboError::NumericalFailure {
                iteration,
                message: "non-finite cost or gradient".into(),
            });
        }
        let grad_norm_inf = grad.iter().fold(0.0_f64, |m, g| m.max(g.abs()));
        trace.push(IterationRecord {
            cost,
            grad_norm_inf,
            saturation: saturation_from_values(&r),
        });
        if grad_norm_inf < config.grad_tol && sigma < config.grad_tol {
            break;
        }
        for (tk, gk) in theta.iter_mut().zip(&grad) {
            *tk -= step * gk;
            if sigma > 0.0 {
                let kick: f64 = rng.sample(StandardNormal);
                *tk += sigma * kick;
            }
        }
        step *= config.step_decay;
        sigma *= config.noise_decay;
    }
    if theta.iter().any(|t| !t.is_finite()) {
        return Err(SquboError::NumericalFailure {
            iteration: config.max_iters,
            message: "non-finite parameters after final update".into(),
        });
    }
    Ok((PhaseParams::from_raw(theta), trace))
}

/// Multistart solve: runs [`descend`] from `config.restarts` independent
/// uniform starts and keeps the restart whose decoded assignment has the
/// lowest energy (ties broken by restart index).
///
/// Restarts run in parallel; each draws its own stream from
/// [`derive_restart_seed`], so the report does not depend on the schedule.
pub fn solve(
    instance: &SpinQuboInstance,
    profile: PhaseProfile,
    config: &OptimizerConfig,
) -> Result<SolveReport<OptimizerConfig>, SquboError> {
    config.validate()?;
    let started = Instant::now();

    struct RestartOutcome {
        restart: usize,
        assignment: SpinAssignment,
        energy: f64,
        cost: f64,
        saturation: f64,
        iterations: usize,
        theta: Vec<f64>,
    }

    let outcomes: Vec<Result<RestartOutcome, RestartFailure>> = (0..config.restarts)
        .into_par_iter()
        .map(|restart| {
            let mut rng =
                ChaCha12Rng::seed_from_u64(derive_restart_seed(config.seed, restart as u64));
            let w = config.init_half_width;
            let theta0: Vec<f64> =
                (0..instance.n()).map(|_| rng.random_range(-w..=w)).collect();
            let run = || -> Result<RestartOutcome, SquboError> {
                let (params, trace) =
                    descend(instance, profile, &PhaseParams::from_raw(theta0), config, &mut rng)?;
                let theta = params.into_vec();
                let r = profile_values(profile, &theta);
                let cost = cost_from_values(instance, &r);
                if !cost.is_finite() {
                    return Err(SquboError::NumericalFailure {
                        iteration: trace.len(),
                        message: "non-finite final cost".into(),
                    });
                }
                let assignment =
                    crate::phase::decode(&PhaseParams::from_raw(theta.clone()), profile);
                let energy = energy(instance, &assignment)?;
                Ok(RestartOutcome {
                    restart,
                    assignment,
                    energy,
                    cost,
                    saturation: saturation_from_values(&r),
                    iterations: trace.len(),
                    theta,
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
        best_cost: best.cost,
        best_params: best.theta.clone(),
        saturation: best.saturation,
        iterations_used: successes.iter().map(|o| o.iterations).collect(),
        restart_energies: successes.iter().map(|o| o.energy).collect(),
        restart_costs: successes.iter().map(|o| o.cost).collect(),
        failed_restarts,
        elapsed: started.elapsed(),
        config: config.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::brute_force_solve;
    use crate::phase::cost;

    use rand::SeedableRng;

    fn five_cycle() -> SpinQuboInstance {
        // Odd antiferromagnetic ring: frustrated, optimum energy -3.
        let triples =
            (0..5).map(|i| (i, (i + 1) % 5, -1.0)).collect::<Vec<_>>();
        SpinQuboInstance::new(5, triples).unwrap()
    }

    fn random_dense(rng: &mut ChaCha12Rng, n: usize) -> SpinQuboInstance {
        let mut triples = Vec::new();
        for i in 0..n {
            for j in i..n {
                triples.push((i, j, rng.random_range(-1.0..=1.0)));
            }
        }
        SpinQuboInstance::new(n, triples).unwrap()
    }

    #[test]
    fn derived_seeds_are_spread_out() {
        let mut seen = std::collections::HashSet::new();
        for seed in [0u64, 1, 42] {
            for restart in 0..64 {
                assert!(seen.insert(derive_restart_seed(seed, restart)));
            }
        }
    }

    #[test]
    fn descend_with_zero_noise_reduces_cost() {
        let profile = PhaseProfile::logistic(1.0).unwrap();
        let inst = five_cycle();
        let config = OptimizerConfig {
            noise_sigma: 0.0,
            max_iters: 500,
            ..OptimizerConfig::for_profile(profile)
        };
        let theta0 = PhaseParams::new(vec![0.9, -0.4, 0.2, -0.7, 0.1]).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let (theta, trace) = descend(&inst, profile, &theta0, &config, &mut rng).unwrap();
        let first = trace.first().unwrap().cost;
        let last = cost(&inst, &theta, profile).unwrap();
        assert!(last < first, "cost did not improve: {first} -> {last}");
        // Plain gradient descent with a modest step on this smooth landscape
        // should descend monotonically.
        for pair in trace.windows(2) {
            assert!(pair[1].cost <= pair[0].cost + 1e-9);
        }
    }

    #[test]
    fn descend_rejects_wrong_dimension_and_bad_config() {
        let profile = PhaseProfile::logistic(1.0).unwrap();
        let inst = five_cycle();
        let config = OptimizerConfig::for_profile(profile);
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let theta0 = PhaseParams::new(vec![0.0; 3]).unwrap();
        assert!(matches!(
            descend(&inst, profile, &theta0, &config, &mut rng),
            Err(SquboError::DimensionMismatch { expected: 5, actual: 3 })
        ));
        let bad = OptimizerConfig { step_size: -1.0, ..config };
        let theta0 = PhaseParams::new(vec![0.0; 5]).unwrap();
        assert!(matches!(
            descend(&inst, profile, &theta0, &bad, &mut rng),
            Err(SquboError::InvalidArgument(_))
        ));
    }

    #[test]
    fn solve_finds_the_frustrated_ring_optimum() {
        let profile = PhaseProfile::clamped_linear(1.0).unwrap();
        let inst = five_cycle();
        let config = OptimizerConfig::for_profile(profile);
        let report = solve(&inst, profile, &config).unwrap();
        let (_, oracle) = brute_force_solve(&inst).unwrap();
        assert_eq!(oracle, -3.0);
        assert_eq!(report.best_energy, oracle);
        assert_eq!(
            energy(&inst, &report.best_assignment).unwrap(),
            report.best_energy
        );
        assert!(report.failed_restarts.is_empty());
        assert_eq!(report.restart_energies.len(), config.restarts);
    }

    #[test]
    fn solve_is_deterministic_for_fixed_seed() {
        let profile = PhaseProfile::logistic(1.0).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(77);
        let inst = random_dense(&mut rng, 8);
        let config = OptimizerConfig {
            restarts: 8,
            max_iters: 300,
            seed: 123,
            ..OptimizerConfig::for_profile(profile)
        };
        let a = solve(&inst, profile, &config).unwrap();
        let b = solve(&inst, profile, &config).unwrap();
        assert_eq!(a.best_assignment, b.best_assignment);
        assert_eq!(a.best_energy.to_bits(), b.best_energy.to_bits());
        assert_eq!(a.best_cost.to_bits(), b.best_cost.to_bits());
        assert_eq!(a.best_params, b.best_params);
        assert_eq!(a.restart_energies, b.restart_energies);
        assert_eq!(a.restart_costs, b.restart_costs);
        assert_eq!(a.iterations_used, b.iterations_used);

        let other = OptimizerConfig { seed: 124, ..config };
        let c = solve(&inst, profile, &other).unwrap();
        assert_ne!(a.best_params, c.best_params);
    }

    #[test]
    fn solve_reports_energy_of_decoded_assignment() {
        let profile = PhaseProfile::logistic(2.0).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(99);
        for _ in 0..5 {
            let inst = random_dense(&mut rng, 6);
            let config = OptimizerConfig {
                restarts: 4,
                max_iters: 400,
                seed: 7,
                ..OptimizerConfig::for_profile(profile)
            };
            let report = solve(&inst, profile, &config).unwrap();
            assert_eq!(
                energy(&inst, &report.best_assignment).unwrap().to_bits(),
                report.best_energy.to_bits()
            );
            // The winner must be the minimum of the per-restart energies.
            let min = report.restart_energies.iter().cloned().fold(f64::INFINITY, f64::min);
            assert_eq!(report.best_energy, min);
        }
    }

    #[test]
    fn saturated_solution_has_matching_cost_and_energy() {
        let profile = PhaseProfile::clamped_linear(1.0).unwrap();
        let inst = five_cycle();
        let config = OptimizerConfig::for_profile(profile);
        let report = solve(&inst, profile, &config).unwrap();
        if report.saturation == 1.0 {
            assert!((report.best_cost - report.best_energy).abs() <= 1e-10);
        }
    }
}
