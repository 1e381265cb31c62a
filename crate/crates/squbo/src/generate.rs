//! Instance generators: seeded random coupling matrices and MaxCut
//! reductions.

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

use crate::error::SquboError;
use crate::instance::{SpinAssignment, SpinQuboInstance};

/// Generates a random coupling instance: each pair `i < j` receives a
/// coefficient drawn uniformly from `range` with probability `density`. The
/// diagonal stays zero. Deterministic in `seed`.
pub fn gen_random(
    n: usize,
    density: f64,
    range: (f64, f64),
    seed: u64,
) -> Result<SpinQuboInstance, SquboError> {
    if n == 0 {
        return Err(SquboError::InvalidArgument(
            "an instance needs at least one variable".into(),
        ));
    }
    if !(0.0..=1.0).contains(&density) {
        return Err(SquboError::InvalidArgument(format!(
            "density must lie in [0, 1], got {density}"
        )));
    }
    let (lo, hi) = range;
    if !lo.is_finite() || !hi.is_finite() || lo > hi {
        return Err(SquboError::InvalidArgument(format!(
            "invalid coefficient range [{lo}, {hi}]"
        )));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut triples = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < density {
                triples.push((i, j, rng.random_range(lo..=hi)));
            }
        }
    }
    SpinQuboInstance::new(n, triples)
}

/// Rewrites weighted MaxCut as a spin-QUBO: coupling `-w` per edge, so the
/// energy of `s` is `sum_e w_e * s_u * s_v` and maximizing the cut is
/// minimizing the energy. Vertices are `0..=max_endpoint`.
pub fn maxcut_to_squbo(edges: &[(usize, usize, f64)]) -> Result<SpinQuboInstance, SquboError> {
    if edges.is_empty() {
        return Err(SquboError::InvalidArgument("edge list is empty".into()));
    }
    let mut n = 0;
    for &(u, v, w) in edges {
        if u == v {
            return Err(SquboError::InvalidArgument(format!("self-loop at vertex {u}")));
        }
        if !w.is_finite() {
            return Err(SquboError::InvalidArgument(format!(
                "non-finite weight on edge ({u}, {v})"
            )));
        }
        n = n.max(u + 1).max(v + 1);
    }
    let triples = edges.iter().map(|&(u, v, w)| (u.min(v), u.max(v), -w));
    SpinQuboInstance::new(n, triples)
}

/// Total weight crossing the partition induced by `s`:
/// `sum_e w_e * (1 - s_u * s_v) / 2`.
pub fn maxcut_value(
    edges: &[(usize, usize, f64)],
    s: &SpinAssignment,
) -> Result<f64, SquboError> {
    let spins = s.spins();
    let mut cut = 0.0;
    for &(u, v, w) in edges {
        if u >= spins.len() || v >= spins.len() {
            return Err(SquboError::DimensionMismatch {
                expected: u.max(v) + 1,
                actual: spins.len(),
            });
        }
        cut += w * f64::from(1 - spins[u] * spins[v]) / 2.0;
    }
    Ok(cut)
}
