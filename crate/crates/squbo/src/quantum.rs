//! Small-scale check that the phase relaxation computes a scaled expectation
//! value of a Pauli-decomposed operator.
//!
//! The instance matrix, zero-padded to dimension `n_pad = 2^N`, is expanded
//! in the Pauli-string basis as `L = (1/n_pad) * sum_k Tr(J_k q) J_k`. With
//! the normalized phases loaded into a state `|psi> = (1/n_pad) * sum_i
//! f(theta_i) |i>`, the quantity `-2^(N-2) * <psi|L|psi>` equals
//! `cost(theta) / (2 * n_pad)`. Everything here is dense and capped at
//! [`QUANTUM_CAP`] variables; it is a correctness check, not a solver.

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::error::SquboError;
use crate::instance::SpinQuboInstance;
use crate::phase::{cost, PhaseParams, PhaseProfile};

/// Largest variable count accepted by the dense-operator routines.
pub const QUANTUM_CAP: usize = 16;

/// Number of qubits and padded dimension for an `n`-variable instance:
/// `dim = 2^qubits` is the smallest power of two at or above `n`.
pub fn padded_dimension(n: usize) -> (usize, usize) {
    let dim = n.next_power_of_two();
    (dim.trailing_zeros() as usize, dim)
}

/// One Pauli-string component of the decomposed operator. The label has one
/// character per qubit from `{I, X, Y, Z}`, leftmost character acting on the
/// highest-order bit of the basis index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub label: String,
    pub coeff: f64,
}

/// Dense complex state vector over the padded basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn from_char(c: char) -> Result<Self, SquboError> {
        match c {
            'I' => Ok(Self::I),
            'X' => Ok(Self::X),
            'Y' => Ok(Self::Y),
            'Z' => Ok(Self::Z),
            _ => Err(SquboError::InvalidArgument(format!(
                "invalid Pauli label character '{c}'"
            ))),
        }
    }

    fn to_char(self) -> char {
        match self {
            Self::I => 'I',
            Self::X => 'X',
            Self::Y => 'Y',
            Self::Z => 'Z',
        }
    }
}

/// A Pauli string has one nonzero entry per column. Returns the row index
/// and entry value of the nonzero in `col`. Character at position `pos`
/// acts on bit `num_qubits - 1 - pos`.
fn column_action(paulis: &[Pauli], num_qubits: usize, col: usize) -> (usize, Complex64) {
    let mut row = col;
    let mut phase = Complex64::new(1.0, 0.0);
    for (pos, p) in paulis.iter().enumerate() {
        let bit_index = num_qubits - 1 - pos;
        let bit = (col >> bit_index) & 1;
        match p {
            Pauli::I => {}
            Pauli::X => row ^= 1 << bit_index,
            Pauli::Y => {
                row ^= 1 << bit_index;
                phase *= if bit == 0 {
                    Complex64::new(0.0, 1.0)
                } else {
                    Complex64::new(0.0, -1.0)
                };
            }
            Pauli::Z => {
                if bit == 1 {
                    phase = -phase;
                }
            }
        }
    }
    (row, phase)
}

/// Expands the zero-padded instance matrix in the Pauli-string basis and
/// returns the terms with nonzero real coefficient `Tr(J q) / n_pad`, in
/// enumeration order.
///
/// For a real symmetric matrix only strings with an even number of `Y`
/// factors survive (their traces are real; odd-`Y` traces have an exactly
/// zero real part), so at most `(n_pad^2 + n_pad) / 2` terms are returned.
pub fn pauli_decompose(instance: &SpinQuboInstance) -> Result<Vec<PauliTerm>, SquboError> {
    let n = instance.n();
    if n > QUANTUM_CAP {
        return Err(SquboError::CapacityExceeded { n, cap: QUANTUM_CAP });
    }
    let (num_qubits, dim) = padded_dimension(n);
    let mut q = vec![vec![0.0; dim]; dim];
    let mut max_abs = 0.0_f64;
    for &(i, j, value) in instance.entries() {
        q[i][j] = value;
        q[j][i] = value;
        max_abs = max_abs.max(value.abs());
    }
    let drop_below = 1e-12 * max_abs.max(1.0);

    let mut terms = Vec::new();
    let mut paulis = vec![Pauli::I; num_qubits];
    for code in 0..(1usize << (2 * num_qubits)) {
        for (pos, p) in paulis.iter_mut().enumerate() {
            *p = match (code >> (2 * (num_qubits - 1 - pos))) & 3 {
                0 => Pauli::I,
                1 => Pauli::X,
                2 => Pauli::Y,
                _ => Pauli::Z,
            };
        }
        let mut trace = Complex64::new(0.0, 0.0);
        for col in 0..dim {
            let (row, phase) = column_action(&paulis, num_qubits, col);
            // Tr(J q) = sum_col J[row, col] * q[col, row].
            trace += phase * q[col][row];
        }
        let coeff = trace.re / dim as f64;
        if coeff.abs() * dim as f64 > drop_below {
            terms.push(PauliTerm {
                label: paulis.iter().map(|p| p.to_char()).collect(),
                coeff,
            });
        }
    }
    Ok(terms)
}

/// Sums `coeff * J` over the terms into a dense complex matrix.
pub fn assemble_operator(
    terms: &[PauliTerm],
    num_qubits: usize,
) -> Result<Vec<Vec<Complex64>>, SquboError> {
    let dim = 1usize << num_qubits;
    let mut out = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for term in terms {
        if term.label.chars().count() != num_qubits {
            return Err(SquboError::InvalidArgument(format!(
                "label '{}' does not have {num_qubits} characters",
                term.label
            )));
        }
        let paulis = term
            .label
            .chars()
            .map(Pauli::from_char)
            .collect::<Result<Vec<_>, _>>()?;
        for col in 0..dim {
            let (row, phase) = column_action(&paulis, num_qubits, col);
            out[row][col] += term.coeff * phase;
        }
    }
    Ok(out)
}

/// Loads the phases into a padded state: amplitude `f(theta_i) / n` on basis
/// state `i` for `i < n`, zero on the padding. The squared norm is `1/n`.
pub fn build_state(
    params: &PhaseParams,
    profile: PhaseProfile,
    n: usize,
) -> Result<StateVector, SquboError> {
    if n == 0 {
        return Err(SquboError::InvalidArgument("state needs at least one variable".into()));
    }
    if n > QUANTUM_CAP {
        return Err(SquboError::CapacityExceeded { n, cap: QUANTUM_CAP });
    }
    if params.len() != n {
        return Err(SquboError::DimensionMismatch { expected: n, actual: params.len() });
    }
    let (_, dim) = padded_dimension(n);
    let scale = 1.0 / n as f64;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
    for (i, &t) in params.theta().iter().enumerate() {
        let angle = -std::f64::consts::PI * profile.value(t);
        amplitudes[i] = Complex64::new(scale * angle.cos(), scale * angle.sin());
    }
    Ok(StateVector { amplitudes })
}

/// Evaluates `-2^(N-2) * <psi|L|psi>` with the parameters zero-padded to the
/// full register, which equals `cost(instance, params) / (2 * n_pad)`.
pub fn quantum_cost(
    instance: &SpinQuboInstance,
    params: &PhaseParams,
    profile: PhaseProfile,
) -> Result<f64, SquboError> {
    if params.len() != instance.n() {
        return Err(SquboError::DimensionMismatch {
            expected: instance.n(),
            actual: params.len(),
        });
    }
    let (num_qubits, dim) = padded_dimension(instance.n());
    let terms = pauli_decompose(instance)?;
    let operator = assemble_operator(&terms, num_qubits)?;

    let mut theta = params.theta().to_vec();
    theta.resize(dim, 0.0);
    let state = build_state(&PhaseParams::new(theta)?, profile, dim)?;
    let amps = state.amplitudes();

    let mut expectation = Complex64::new(0.0, 0.0);
    for (i, row) in operator.iter().enumerate() {
        for (j, &l) in row.iter().enumerate() {
            expectation += amps[i].conj() * l * amps[j];
        }
    }
    let scaled = -(2.0_f64.powi(num_qubits as i32 - 2)) * expectation;
    if scaled.im.abs() > 1e-8 {
        return Err(SquboError::NumericalFailure {
            iteration: 0,
            message: format!("imaginary residue {} in expectation value", scaled.im),
        });
    }
    Ok(scaled.re)
}

/// Summary of a randomized agreement check between [`quantum_cost`] and the
/// classical cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumCheckReport {
    pub n: usize,
    pub n_padded: usize,
    pub trials: usize,
    pub seed: u64,
    /// Largest observed `|quantum_cost - cost / (2 * n_padded)|`.
    pub max_deviation: f64,
    /// Number of nonzero Pauli terms in the decomposition.
    pub pauli_terms: usize,
    /// `(n_padded^2 + n_padded) / 2`, the symmetric-basis size.
    pub term_bound: usize,
    pub bound_satisfied: bool,
}

/// Runs `trials` random-parameter comparisons of the quantum and classical
/// costs on one instance. Parameters are drawn uniformly from `[-4, 4]`
/// under a unit-steepness logistic profile; the draw is deterministic in
/// `seed`.
pub fn equivalence_report(
    instance: &SpinQuboInstance,
    trials: usize,
    seed: u64,
) -> Result<QuantumCheckReport, SquboError> {
    let n = instance.n();
    let (_, dim) = padded_dimension(n);
    let profile = PhaseProfile::logistic(1.0)?;
    let terms = pauli_decompose(instance)?;

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut max_deviation = 0.0_f64;
    for _ in 0..trials {
        let theta: Vec<f64> = (0..n).map(|_| rng.random_range(-4.0..=4.0)).collect();
        let params = PhaseParams::new(theta)?;
        let quantum = quantum_cost(instance, &params, profile)?;
        let classical = cost(instance, &params, profile)?;
        max_deviation = max_deviation.max((quantum - classical / (2.0 * dim as f64)).abs());
    }

    let term_bound = (dim * dim + dim) / 2;
    Ok(QuantumCheckReport {
        n,
        n_padded: dim,
        trials,
        seed,
        max_deviation,
        pauli_terms: terms.len(),
        term_bound,
        bound_satisfied: terms.len() <= term_bound,
    })
}
