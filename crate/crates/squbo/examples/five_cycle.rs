//! Solves the antiferromagnetic 5-cycle three ways and prints the results.

use squbo::{
    brute_force_solve, lin_relax_solve, solve, LinRelaxConfig, OptimizerConfig, PhaseProfile,
    SpinQuboInstance,
};

fn main() {
    let triples: Vec<(usize, usize, f64)> = (0..5).map(|i| (i, (i + 1) % 5, -1.0)).collect();
    let inst = SpinQuboInstance::new(5, triples).unwrap().with_name("five-cycle");

    let (exact_s, exact_e) = brute_force_solve(&inst).unwrap();
    println!("exhaustive: energy {exact_e} at {exact_s}");

    let profile = PhaseProfile::clamped_linear(1.0).unwrap();
    let report = solve(&inst, profile, &OptimizerConfig::for_profile(profile)).unwrap();
    println!(
        "phase:      energy {} at {} (saturation {:.3})",
        report.best_energy, report.best_assignment, report.saturation
    );

    let report = lin_relax_solve(&inst, &LinRelaxConfig::default()).unwrap();
    println!(
        "linear:     energy {} at {} (saturation {:.3})",
        report.best_energy, report.best_assignment, report.saturation
    );
}
