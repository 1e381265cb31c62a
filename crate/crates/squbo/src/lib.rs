//! Solvers for spin-QUBO problems: minimize `-(1/2) * s^T Q s` over
//! `s in {-1,+1}^n` for a symmetric coefficient matrix `Q`.
//!
//! The main solver relaxes each spin to a unit phase on the complex circle
//! ([`phase`]) and runs multistart perturbed gradient descent over the
//! continuous parameters ([`optimize`]). A box-constrained linear relaxation
//! ([`baseline`]) and an exhaustive scan ([`instance::brute_force_solve`])
//! serve as reference points, and [`quantum`] checks that the relaxed cost is
//! a scaled expectation value of a Pauli-decomposed operator on small
//! instances. [`format`], [`generate`], and [`report`] cover instance files,
//! instance generation, and serializable run records.

pub mod baseline;
pub mod error;
pub mod format;
pub mod generate;
pub mod instance;
pub mod optimize;
pub mod phase;
pub mod quantum;
pub mod report;

pub use baseline::{lin_descend, lin_objective, lin_relax_solve, threshold, LinRelaxConfig};
pub use error::SquboError;
pub use format::{
    canonical_body, instance_to_string, parse_instance_str, read_instance, write_instance,
};
pub use generate::{gen_random, maxcut_to_squbo, maxcut_value};
pub use instance::{
    brute_force_solve, brute_force_solve_with_cap, energy, from_binary, global_flip,
    BinaryConversion, BinaryQubo, SpinAssignment, SpinQuboInstance, DEFAULT_BRUTE_CAP,
};
pub use optimize::{
    derive_restart_seed, descend, solve, IterationRecord, OptimizerConfig, RestartFailure,
    SolveReport,
};
pub use phase::{
    cost, decode, gradient, relax, saturation, PhaseParams, PhaseProfile, RelaxedState,
};
pub use quantum::{
    assemble_operator, build_state, equivalence_report, padded_dimension, pauli_decompose,
    quantum_cost, PauliTerm, QuantumCheckReport, StateVector, QUANTUM_CAP,
};
pub use report::{Method, MethodConfig, RunRecord};
