//! Serializable run records.
//!
//! A [`RunRecord`] captures everything that determines and describes a solver
//! run except wall time, so records from identical runs serialize to
//! identical bytes. Timing belongs on a diagnostic channel, not in the
//! record.

use serde::{Deserialize, Serialize};

use crate::baseline::LinRelaxConfig;
use crate::error::SquboError;
use crate::instance::{SpinAssignment, SpinQuboInstance};
use crate::optimize::{OptimizerConfig, SolveReport};
use crate::phase::PhaseProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Phase,
    Linear,
    Brute,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Phase => "phase",
            Self::Linear => "linear",
            Self::Brute => "brute",
        })
    }
}

/// Echo of the configuration a record was produced with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodConfig {
    Phase { profile: PhaseProfile, optimizer: OptimizerConfig },
    Linear(LinRelaxConfig),
    Brute { cap: usize },
}

/// One solver run on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: Option<String>,
    /// [`SpinQuboInstance::content_hash`] of the instance.
    pub instance_hash: String,
    pub n: usize,
    pub method: Method,
    pub config: MethodConfig,
    pub seed: Option<u64>,
    pub best_energy: f64,
    /// Sign string, one of `+`/`-` per variable.
    pub best_assignment: String,
    pub saturation: f64,
    /// Decoded energy of each successful restart, in restart order. Empty
    /// for exhaustive runs.
    pub restart_energies: Vec<f64>,
}

impl RunRecord {
    pub fn phase(
        instance: &SpinQuboInstance,
        profile: PhaseProfile,
        report: &SolveReport<OptimizerConfig>,
    ) -> Self {
        Self {
            instance: instance.name().map(str::to_string),
            instance_hash: instance.content_hash(),
            n: instance.n(),
            method: Method::Phase,
            config: MethodConfig::Phase {
                profile,
                optimizer: report.config.clone(),
            },
            seed: Some(report.config.seed),
            best_energy: report.best_energy,
            best_assignment: report.best_assignment.to_string(),
            saturation: report.saturation,
            restart_energies: report.restart_energies.clone(),
        }
    }

    pub fn linear(instance: &SpinQuboInstance, report: &SolveReport<LinRelaxConfig>) -> Self {
        Self {
            instance: instance.name().map(str::to_string),
            instance_hash: instance.content_hash(),
            n: instance.n(),
            method: Method::Linear,
            config: MethodConfig::Linear(report.config.clone()),
            seed: Some(report.config.seed),
            best_energy: report.best_energy,
            best_assignment: report.best_assignment.to_string(),
            saturation: report.saturation,
            restart_energies: report.restart_energies.clone(),
        }
    }

    pub fn brute(
        instance: &SpinQuboInstance,
        assignment: &SpinAssignment,
        energy: f64,
        cap: usize,
    ) -> Self {
        Self {
            instance: instance.name().map(str::to_string),
            instance_hash: instance.content_hash(),
            n: instance.n(),
            method: Method::Brute,
            config: MethodConfig::Brute { cap },
            seed: None,
            best_energy: energy,
            best_assignment: assignment.to_string(),
            // An exact assignment is fully decided by definition.
            saturation: 1.0,
            restart_energies: Vec::new(),
        }
    }

    /// Pretty JSON with a trailing newline. Identical records render to
    /// identical bytes.
    pub fn to_json(&self) -> Result<String, SquboError> {
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|e| SquboError::InvalidArgument(format!("serialization failed: {e}")))?;
        text.push('\n');
        Ok(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimize::solve;

    fn five_cycle() -> SpinQuboInstance {
        let triples = (0..5).map(|i| (i, (i + 1) % 5, -1.0)).collect::<Vec<_>>();
        SpinQuboInstance::new(5, triples).unwrap().with_name("five-cycle")
    }

    #[test]
    fn identical_runs_serialize_identically() {
        let inst = five_cycle();
        let profile = PhaseProfile::clamped_linear(1.0).unwrap();
        let config = OptimizerConfig { restarts: 4, max_iters: 200, ..OptimizerConfig::for_profile(profile) };
        let a = RunRecord::phase(&inst, profile, &solve(&inst, profile, &config).unwrap());
        let b = RunRecord::phase(&inst, profile, &solve(&inst, profile, &config).unwrap());
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    }

    #[test]
    fn records_round_trip_through_json() {
        let inst = five_cycle();
        let profile = PhaseProfile::logistic(2.0).unwrap();
        let config = OptimizerConfig { restarts: 2, max_iters: 50, ..OptimizerConfig::for_profile(profile) };
        let record = RunRecord::phase(&inst, profile, &solve(&inst, profile, &config).unwrap());
        let text = record.to_json().unwrap();
        let back: RunRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(back, record);
        assert_eq!(back.method, Method::Phase);
        assert_eq!(back.n, 5);
        assert_eq!(back.instance.as_deref(), Some("five-cycle"));
        assert_eq!(back.best_assignment.len(), 5);
    }

    #[test]
    fn brute_records_have_no_seed_or_restarts() {
        let inst = five_cycle();
        let (s, e) = crate::instance::brute_force_solve(&inst).unwrap();
        let record = RunRecord::brute(&inst, &s, e, 24);
        assert_eq!(record.seed, None);
        assert!(record.restart_energies.is_empty());
        assert_eq!(record.best_energy, -3.0);
        assert_eq!(record.saturation, 1.0);
        let text = record.to_json().unwrap();
        assert!(text.contains("\"method\": \"brute\""));
        assert!(text.ends_with('\n'));
    }
}
