//! Spin-QUBO instances, spin assignments, energy evaluation, and exhaustive search.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::error::SquboError;

/// Default cap on the variable count accepted by [`brute_force_solve`].
pub const DEFAULT_BRUTE_CAP: usize = 24;

/// A spin-QUBO instance: minimize `-(1/2) * sum_{i,j} s_i q_ij s_j` over
/// `s in {-1,+1}^n` with a symmetric coefficient matrix `q`.
///
/// Coefficients are stored as canonical upper-triangle triples `(i, j, value)`
/// with `i <= j`, sorted by `(i, j)`, duplicate positions summed and exact
/// zeros dropped. An off-diagonal triple stands for both `q_ij` and `q_ji`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinQuboInstance {
    n: usize,
    entries: Vec<(usize, usize, f64)>,
    name: Option<String>,
}

impl SpinQuboInstance {
    /// Builds an instance from coordinate triples. Triples with `i > j` are
    /// mirrored into the upper triangle, duplicates are summed, and entries
    /// that sum to exactly zero are dropped.
    pub fn new(
        n: usize,
        triples: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self, SquboError> {
        if n == 0 {
            return Err(SquboError::InvalidArgument(
                "an instance needs at least one variable".into(),
            ));
        }
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (i, j, value) in triples {
            if i >= n || j >= n {
                return Err(SquboError::InvalidArgument(format!(
                    "coefficient index ({i}, {j}) out of range for {n} variables"
                )));
            }
            if !value.is_finite() {
                return Err(SquboError::InvalidArgument(format!(
                    "non-finite coefficient at ({i}, {j})"
                )));
            }
            *merged.entry((i.min(j), i.max(j))).or_insert(0.0) += value;
        }
        let entries = merged
            .into_iter()
            .filter(|&(_, value)| value != 0.0)
            .map(|((i, j), value)| (i, j, value))
            .collect();
        Ok(Self { n, entries, name: None })
    }

    /// Builds an instance from a dense symmetric matrix given as rows.
    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self, SquboError> {
        let n = rows.len();
        if n == 0 {
            return Err(SquboError::InvalidArgument(
                "an instance needs at least one variable".into(),
            ));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(SquboError::DimensionMismatch { expected: n, actual: row.len() });
            }
            for (j, &value) in row.iter().enumerate() {
                if value != rows[j][i] {
                    return Err(SquboError::InvalidArgument(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        let mut triples = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            for (j, &value) in row.iter().enumerate().skip(i) {
                if value != 0.0 {
                    triples.push((i, j, value));
                }
            }
        }
        Self::new(n, triples)
    }

    /// Attaches a human-readable name, used by the file format and reports.
    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// Canonical upper-triangle triples, sorted by `(i, j)`.
    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    /// Number of stored (nonzero) upper-triangle coefficients.
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Expands the stored triples into a dense symmetric matrix.
    pub fn dense(&self) -> Vec<Vec<f64>> {
        let mut rows = vec![vec![0.0; self.n]; self.n];
        for &(i, j, value) in &self.entries {
            rows[i][j] = value;
            rows[j][i] = value;
        }
        rows
    }

    /// Sum of the diagonal coefficients.
    pub fn trace(&self) -> f64 {
        self.entries
            .iter()
            .filter(|&&(i, j, _)| i == j)
            .map(|&(_, _, value)| value)
            .sum()
    }
}

/// A spin vector with entries in `{-1, +1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinAssignment(Vec<i8>);

impl SpinAssignment {
    pub fn new(spins: Vec<i8>) -> Result<Self, SquboError> {
        if let Some(pos) = spins.iter().position(|&s| s != 1 && s != -1) {
            return Err(SquboError::InvalidArgument(format!(
                "spin at index {pos} is {}, expected -1 or +1",
                spins[pos]
            )));
        }
        Ok(Self(spins))
    }

    pub fn spins(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for SpinAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.0 {
            f.write_str(if s > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

/// Flips every spin. The energy is invariant under this map because every
/// term of the objective is quadratic in `s`.
pub fn global_flip(s: &SpinAssignment) -> SpinAssignment {
    SpinAssignment(s.0.iter().map(|&x| -x).collect())
}

/// Evaluates `-(1/2) * sum_{i,j} s_i q_ij s_j` from the canonical triples.
///
/// Off-diagonal triples count twice (once as `q_ij`, once as `q_ji`), so each
/// contributes `-value * s_i * s_j`; a diagonal triple contributes
/// `-value / 2` since `s_i^2 = 1`.
pub fn energy(instance: &SpinQuboInstance, s: &SpinAssignment) -> Result<f64, SquboError> {
    if s.len() != instance.n {
        return Err(SquboError::DimensionMismatch { expected: instance.n, actual: s.len() });
    }
    let spins = s.spins();
    let mut acc = 0.0;
    for &(i, j, value) in instance.entries() {
        if i == j {
            acc += 0.5 * value;
        } else {
            acc += value * f64::from(spins[i] * spins[j]);
        }
    }
    Ok(-acc)
}

/// Exhaustive minimization with the default cap of [`DEFAULT_BRUTE_CAP`] variables.
pub fn brute_force_solve(
    instance: &SpinQuboInstance,
) -> Result<(SpinAssignment, f64), SquboError> {
    brute_force_solve_with_cap(instance, DEFAULT_BRUTE_CAP)
}

/// Exhaustive minimization over all `2^n` assignments. Caps above 63 are
/// treated as 63 so the enumeration counter cannot overflow.
///
/// Ties are broken lexicographically with `-1` ordered before `+1`, so the
/// returned assignment is the lexicographically smallest minimizer. The scan
/// is parallel but the outcome is independent of the partitioning.
pub fn brute_force_solve_with_cap(
    instance: &SpinQuboInstance,
    cap: usize,
) -> Result<(SpinAssignment, f64), SquboError> {
    let n = instance.n();
    let cap = cap.min(63);
    if n > cap {
        return Err(SquboError::CapacityExceeded { n, cap });
    }
    let total: usize = 1 << n;
    // Codes enumerate assignments with bit (n-1-i) holding spin i (set = +1),
    // so ascending code order is ascending lexicographic order.
    let (best_energy, best_code) = (0..total)
        .into_par_iter()
        .with_min_len(1 << 12)
        .map(|code| (evaluate_code(instance, code as u64), code as u64))
        .reduce(
            || (f64::INFINITY, u64::MAX),
            |a, b| match b.0.total_cmp(&a.0).then(b.1.cmp(&a.1)) {
                Ordering::Less => b,
                _ => a,
            },
        );
    Ok((assignment_from_code(n, best_code), best_energy))
}

/// Energy of the assignment encoded by `code`. Mirrors [`energy`] term for
/// term so both paths produce bit-identical sums.
fn evaluate_code(instance: &SpinQuboInstance, code: u64) -> f64 {
    let n = instance.n();
    let mut acc = 0.0;
    for &(i, j, value) in instance.entries() {
        if i == j {
            acc += 0.5 * value;
        } else {
            let equal = ((code >> (n - 1 - i)) ^ (code >> (n - 1 - j))) & 1 == 0;
            acc += if equal { value } else { -value };
        }
    }
    -acc
}

fn assignment_from_code(n: usize, code: u64) -> SpinAssignment {
    let spins = (0..n)
        .map(|i| if (code >> (n - 1 - i)) & 1 == 1 { 1 } else { -1 })
        .collect();
    SpinAssignment(spins)
}

/// A 0/1 QUBO: minimize `x^T a x` over `x in {0,1}^n` with `a` symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryQubo {
    n: usize,
    a: Vec<Vec<f64>>,
}

impl BinaryQubo {
    pub fn new(a: Vec<Vec<f64>>) -> Result<Self, SquboError> {
        let n = a.len();
        if n == 0 {
            return Err(SquboError::InvalidArgument(
                "a binary QUBO needs at least one variable".into(),
            ));
        }
        for (i, row) in a.iter().enumerate() {
            if row.len() != n {
                return Err(SquboError::DimensionMismatch { expected: n, actual: row.len() });
            }
            for (j, &value) in row.iter().enumerate() {
                if !value.is_finite() {
                    return Err(SquboError::InvalidArgument(format!(
                        "non-finite coefficient at ({i}, {j})"
                    )));
                }
                if value != a[j][i] {
                    return Err(SquboError::InvalidArgument(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self { n, a })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.a
    }
}

/// Result of rewriting a 0/1 QUBO in spin variables.
///
/// For every binary `x` and its embedding `s`,
/// `x^T a x == energy(&instance, &s) + offset`.
#[derive(Debug, Clone)]
pub struct BinaryConversion {
    pub instance: SpinQuboInstance,
    pub offset: f64,
    /// True when a fixed auxiliary spin was appended as the last variable to
    /// absorb linear terms.
    pub uses_aux: bool,
}

impl BinaryConversion {
    /// Embeds a binary assignment: `x_i = 0 -> s_i = -1`, `x_i = 1 -> s_i = +1`,
    /// with the auxiliary spin (if any) fixed to `+1`.
    pub fn embed(&self, x: &[bool]) -> Result<SpinAssignment, SquboError> {
        let n_bin = self.instance.n() - usize::from(self.uses_aux);
        if x.len() != n_bin {
            return Err(SquboError::DimensionMismatch { expected: n_bin, actual: x.len() });
        }
        let mut spins: Vec<i8> = x.iter().map(|&b| if b { 1 } else { -1 }).collect();
        if self.uses_aux {
            spins.push(1);
        }
        Ok(SpinAssignment(spins))
    }
}

/// Rewrites minimization of `x^T a x` over `{0,1}^n` as a spin-QUBO.
///
/// Substituting `x = (s + 1) / 2` gives off-diagonal couplings
/// `q_ij = -a_ij / 2`, row-sum couplings `-(sum_j a_ij) / 2` to an auxiliary
/// spin gauge-fixed to `+1` (appended only when some row sum is nonzero), and
/// a constant `offset = (sum_ij a_ij + sum_i a_ii) / 4`.
pub fn from_binary(bin: &BinaryQubo) -> BinaryConversion {
    let n = bin.n();
    let a = bin.matrix();
    let row_sums: Vec<f64> = a.iter().map(|row| row.iter().sum()).collect();
    let uses_aux = row_sums.iter().any(|&r| r != 0.0);

    let mut triples = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            triples.push((i, j, -0.5 * a[i][j]));
        }
    }
    if uses_aux {
        for (i, &r) in row_sums.iter().enumerate() {
            triples.push((i, n, -0.5 * r));
        }
    }

    let total: f64 = row_sums.iter().sum();
    let diag: f64 = (0..n).map(|i| a[i][i]).sum();
    let offset = 0.25 * (total + diag);

    let n_spin = n + usize::from(uses_aux);
    let instance =
        SpinQuboInstance::new(n_spin, triples).expect("conversion produces valid triples");
    BinaryConversion { instance, offset, uses_aux }
}
