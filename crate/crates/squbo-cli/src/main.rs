//! Command-line front end for the squbo solvers.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on runtime failures.
//! Everything written to stdout and to `--out` files is deterministic for
//! fixed flags; timing goes to stderr.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use squbo::{
    brute_force_solve_with_cap, equivalence_report, gen_random, lin_relax_solve, read_instance,
    solve, write_instance, LinRelaxConfig, OptimizerConfig, PhaseProfile, RunRecord, SquboError,
    DEFAULT_BRUTE_CAP,
};

#[derive(Parser)]
#[command(
    name = "squbo",
    version,
    about = "Spin-QUBO solvers: phase relaxation, a linear-relaxation baseline, \
             exhaustive search, and a quantum-operator equivalence check"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct PhaseFlags {
    /// Phase profile: logistic:<steepness> or clamped:<half_width>.
    #[arg(long, default_value = "clamped:1")]
    profile: String,
    /// Number of independent restarts.
    #[arg(long)]
    restarts: Option<usize>,
    /// Iteration budget per restart.
    #[arg(long)]
    iters: Option<usize>,
    /// Initial gradient step size.
    #[arg(long)]
    step: Option<f64>,
    /// Initial perturbation noise level.
    #[arg(long)]
    noise: Option<f64>,
    /// Base seed for the restart streams.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl PhaseFlags {
    fn build(&self) -> Result<(PhaseProfile, OptimizerConfig), SquboError> {
        let profile: PhaseProfile = self.profile.parse()?;
        let mut config = OptimizerConfig::for_profile(profile);
        if let Some(r) = self.restarts {
            config.restarts = r;
        }
        if let Some(i) = self.iters {
            config.max_iters = i;
        }
        if let Some(s) = self.step {
            config.step_size = s;
        }
        if let Some(n) = self.noise {
            config.noise_sigma = n;
        }
        config.seed = self.seed;
        config.validate()?;
        Ok((profile, config))
    }
}

#[derive(Args)]
struct BaselineFlags {
    /// Number of independent restarts.
    #[arg(long)]
    restarts: Option<usize>,
    /// Iteration budget per restart.
    #[arg(long)]
    iters: Option<usize>,
    /// Gradient step size.
    #[arg(long)]
    step: Option<f64>,
    /// Base seed for the restart streams.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl BaselineFlags {
    fn build(&self) -> Result<LinRelaxConfig, SquboError> {
        let mut config = LinRelaxConfig::default();
        if let Some(r) = self.restarts {
            config.restarts = r;
        }
        if let Some(i) = self.iters {
            config.max_iters = i;
        }
        if let Some(s) = self.step {
            config.step_size = s;
        }
        config.seed = self.seed;
        config.validate()?;
        Ok(config)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Minimize with the phase-relaxation solver.
    Solve {
        /// Instance file.
        input: PathBuf,
        #[command(flatten)]
        flags: PhaseFlags,
        /// Write the run record as JSON to this path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimize with the box-constrained linear-relaxation baseline.
    Baseline {
        /// Instance file.
        input: PathBuf,
        #[command(flatten)]
        flags: BaselineFlags,
        /// Write the run record as JSON to this path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimize exhaustively over all assignments.
    Brute {
        /// Instance file.
        input: PathBuf,
        /// Largest variable count to accept.
        #[arg(long, default_value_t = DEFAULT_BRUTE_CAP)]
        cap: usize,
        /// Write the run record as JSON to this path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the relaxed cost against the scaled quantum expectation value.
    Qcheck {
        /// Instance file.
        input: PathBuf,
        /// Number of random parameter draws.
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Seed for the parameter draws.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest acceptable deviation; exceeding it fails the run.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Write the check report as JSON to this path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a random coupling instance and write it to a file.
    Gen {
        /// Number of variables.
        #[arg(long)]
        n: usize,
        /// Probability that each pair receives a coupling.
        #[arg(long, default_value_t = 1.0)]
        density: f64,
        /// Coefficient range as <lo>,<hi>.
        #[arg(long, default_value = "-1,1", allow_hyphen_values = true)]
        range: String,
        /// Generator seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output instance file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every solver over a directory of .squbo files and write a CSV.
    Bench {
        /// Directory containing .squbo instance files.
        dir: PathBuf,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        flags: PhaseFlags,
        /// Skip the exhaustive oracle above this variable count.
        #[arg(long, default_value_t = 20)]
        brute_cap: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn write_record(out: Option<&Path>, record: &RunRecord) -> Result<(), SquboError> {
    if let Some(path) = out {
        fs::write(path, record.to_json()?)?;
    }
    Ok(())
}

/// Reads an instance, prefixing any failure with the offending path.
fn load(path: &Path) -> Result<squbo::SpinQuboInstance, SquboError> {
    read_instance(path)
        .map_err(|e| SquboError::InvalidArgument(format!("{}: {e}", path.display())))
}

fn run(command: Command) -> Result<(), SquboError> {
    match command {
        Command::Solve { input, flags, out } => {
            let instance = load(&input)?;
            let (profile, config) = flags.build()?;
            let report = solve(&instance, profile, &config)?;
            println!("instance: {}", instance.name().unwrap_or("<unnamed>"));
            println!("method: phase");
            println!("profile: {profile}");
            println!("seed: {}", config.seed);
            println!("energy: {}", report.best_energy);
            println!("assignment: {}", report.best_assignment);
            println!("saturation: {}", report.saturation);
            println!(
                "restarts: {} ({} failed)",
                config.restarts,
                report.failed_restarts.len()
            );
            eprintln!("time: {:.1} ms", report.elapsed.as_secs_f64() * 1e3);
            write_record(out.as_deref(), &RunRecord::phase(&instance, profile, &report))
        }
        Command::Baseline { input, flags, out } => {
            let instance = load(&input)?;
            let config = flags.build()?;
            let report = lin_relax_solve(&instance, &config)?;
            println!("instance: {}", instance.name().unwrap_or("<unnamed>"));
            println!("method: linear");
            println!("seed: {}", config.seed);
            println!("energy: {}", report.best_energy);
            println!("assignment: {}", report.best_assignment);
            println!("saturation: {}", report.saturation);
            println!(
                "restarts: {} ({} failed)",
                config.restarts,
                report.failed_restarts.len()
            );
            eprintln!("time: {:.1} ms", report.elapsed.as_secs_f64() * 1e3);
            write_record(out.as_deref(), &RunRecord::linear(&instance, &report))
        }
        Command::Brute { input, cap, out } => {
            let instance = load(&input)?;
            let started = Instant::now();
            let (assignment, energy) = brute_force_solve_with_cap(&instance, cap)?;
            println!("instance: {}", instance.name().unwrap_or("<unnamed>"));
            println!("method: brute");
            println!("energy: {energy}");
            println!("assignment: {assignment}");
            eprintln!("time: {:.1} ms", started.elapsed().as_secs_f64() * 1e3);
            write_record(out.as_deref(), &RunRecord::brute(&instance, &assignment, energy, cap))
        }
        Command::Qcheck { input, trials, seed, tol, out } => {
            let instance = load(&input)?;
            let started = Instant::now();
            let report = equivalence_report(&instance, trials, seed)?;
            println!("instance: {}", instance.name().unwrap_or("<unnamed>"));
            println!("n: {} (padded {})", report.n, report.n_padded);
            println!(
                "pauli terms: {} (bound {}, satisfied: {})",
                report.pauli_terms, report.term_bound, report.bound_satisfied
            );
            println!("trials: {}", report.trials);
            println!("seed: {}", report.seed);
            println!("max deviation: {:e}", report.max_deviation);
            println!("tolerance: {tol:e}");
            let ok = report.max_deviation <= tol && report.bound_satisfied;
            println!("within tolerance: {ok}");
            eprintln!("time: {:.1} ms", started.elapsed().as_secs_f64() * 1e3);
            if let Some(path) = out {
                let mut text = serde_json::to_string_pretty(&report).map_err(|e| {
                    SquboError::InvalidArgument(format!("serialization failed: {e}"))
                })?;
                text.push('\n');
                fs::write(path, text)?;
            }
            if !ok {
                return Err(SquboError::NumericalFailure {
                    iteration: trials,
                    message: format!(
                        "max deviation {:e} exceeds tolerance {tol:e}",
                        report.max_deviation
                    ),
                });
            }
            Ok(())
        }
        Command::Gen { n, density, range, seed, out } => {
            let (lo, hi) = parse_range(&range)?;
            let instance = gen_random(n, density, (lo, hi), seed)?;
            let named = match out.file_stem().and_then(|s| s.to_str()) {
                Some(stem) => instance.with_name(stem),
                None => instance,
            };
            write_instance(&out, &named)?;
            println!("wrote {} (n={}, nnz={})", out.display(), named.n(), named.nnz());
            Ok(())
        }
        Command::Bench { dir, out, flags, brute_cap } => bench(&dir, &out, &flags, brute_cap),
    }
}

fn parse_range(text: &str) -> Result<(f64, f64), SquboError> {
    let bad = || {
        SquboError::InvalidArgument(format!("invalid range '{text}': expected <lo>,<hi>"))
    };
    let (lo, hi) = text.split_once(',').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    Ok((lo, hi))
}

fn bench(dir: &Path, out: &Path, flags: &PhaseFlags, brute_cap: usize) -> Result<(), SquboError> {
    let (profile, phase_config) = flags.build()?;
    let lin_config = LinRelaxConfig {
        restarts: phase_config.restarts,
        max_iters: phase_config.max_iters,
        seed: phase_config.seed,
        ..LinRelaxConfig::default()
    };

    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .map(|entry| entry.path())
        .filter(|p| p.extension().is_some_and(|ext| ext == "squbo"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(SquboError::InvalidArgument(format!(
            "no .squbo files in {}",
            dir.display()
        )));
    }

    let mut csv = String::from("instance,method,n,energy,oracle_energy,gap,saturation,time_ms,seed\n");
    let mut rows = 0;
    for path in &paths {
        let instance = load(path)?;
        let name = instance.name().unwrap_or("<unnamed>").to_string();
        let n = instance.n();

        let oracle = if n <= brute_cap {
            let started = Instant::now();
            let (_, energy) = brute_force_solve_with_cap(&instance, brute_cap)?;
            Some((energy, started.elapsed().as_secs_f64() * 1e3))
        } else {
            None
        };
        let fmt_oracle = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();

        if let Some((energy, ms)) = oracle {
            writeln!(csv, "{name},brute,{n},{energy},{energy},0,1,{ms:.3},")
                .expect("string write");
            rows += 1;
        }

        let started = Instant::now();
        let lin = lin_relax_solve(&instance, &lin_config)?;
        let ms = started.elapsed().as_secs_f64() * 1e3;
        let gap = fmt_oracle(oracle.map(|(e, _)| lin.best_energy - e));
        writeln!(
            csv,
            "{name},linear,{n},{},{},{gap},{},{ms:.3},{}",
            lin.best_energy,
            fmt_oracle(oracle.map(|(e, _)| e)),
            lin.saturation,
            lin_config.seed
        )
        .expect("string write");
        rows += 1;

        let started = Instant::now();
        let phase = solve(&instance, profile, &phase_config)?;
        let ms = started.elapsed().as_secs_f64() * 1e3;
        let gap = fmt_oracle(oracle.map(|(e, _)| phase.best_energy - e));
        writeln!(
            csv,
            "{name},phase,{n},{},{},{gap},{},{ms:.3},{}",
            phase.best_energy,
            fmt_oracle(oracle.map(|(e, _)| e)),
            phase.saturation,
            phase_config.seed
        )
        .expect("string write");
        rows += 1;
    }

    fs::write(out, csv)?;
    println!("wrote {} ({} rows, {} instances)", out.display(), rows, paths.len());
    Ok(())
}
