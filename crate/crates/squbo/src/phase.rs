//! Continuous phase relaxation of the spin-QUBO objective.
//!
//! Each spin is replaced by a unit phase `f(theta_i) = exp(-i * pi * R(theta_i))`
//! where `R` maps the real line into `[0, 1]`. The relaxed cost
//!
//! ```text
//! cost(theta) = -( sum_{i > j} q_ij * cos(pi * (R_i - R_j)) + trace(q) / 2 )
//! ```
//!
//! equals `-(1/2) * f^H q f` exactly and recovers the discrete energy whenever
//! every `R_i` sits at 0 or 1.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::SquboError;
use crate::instance::{SpinAssignment, SpinQuboInstance};

/// Smooth or piecewise-linear map from the real line onto `[0, 1]`.
///
/// Both profiles are monotone, take the value `1/2` at zero, and approach 0
/// and 1 in the limits, so decoded spins follow the sign of the parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhaseProfile {
    /// `R(t) = 1 / (1 + exp(-steepness * t))`.
    Logistic { steepness: f64 },
    /// 0 below `-half_width`, 1 above `half_width`, linear in between.
    ClampedLinear { half_width: f64 },
}

impl PhaseProfile {
    pub fn logistic(steepness: f64) -> Result<Self, SquboError> {
        if !steepness.is_finite() || steepness <= 0.0 {
            return Err(SquboError::InvalidArgument(format!(
                "logistic steepness must be positive and finite, got {steepness}"
            )));
        }
        Ok(Self::Logistic { steepness })
    }

    pub fn clamped_linear(half_width: f64) -> Result<Self, SquboError> {
        if !half_width.is_finite() || half_width <= 0.0 {
            return Err(SquboError::InvalidArgument(format!(
                "clamped-linear half width must be positive and finite, got {half_width}"
            )));
        }
        Ok(Self::ClampedLinear { half_width })
    }

    /// Evaluates `R(t)`.
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Self::Logistic { steepness } => 1.0 / (1.0 + (-steepness * t).exp()),
            Self::ClampedLinear { half_width } => {
                if t <= -half_width {
                    0.0
                } else if t >= half_width {
                    1.0
                } else {
                    (t + half_width) / (2.0 * half_width)
                }
            }
        }
    }

    /// Evaluates `R'(t)`. At the two kinks of the clamped profile the
    /// interior one-sided slope is used, so `R'(+-half_width) = 1 / (2 * half_width)`.
    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            Self::Logistic { steepness } => {
                let v = self.value(t);
                steepness * v * (1.0 - v)
            }
            Self::ClampedLinear { half_width } => {
                if t.abs() <= half_width {
                    1.0 / (2.0 * half_width)
                } else {
                    0.0
                }
            }
        }
    }

    /// Half-width of the recommended uniform initialization interval:
    /// a quarter of the (soft) transition width, keeping initial points in
    /// the responsive region of the profile.
    pub fn default_init_half_width(&self) -> f64 {
        match *self {
            Self::Logistic { steepness } => 2.0 / steepness,
            Self::ClampedLinear { half_width } => 0.5 * half_width,
        }
    }
}

impl fmt::Display for PhaseProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Logistic { steepness } => write!(f, "logistic:{steepness}"),
            Self::ClampedLinear { half_width } => write!(f, "clamped:{half_width}"),
        }
    }
}

impl FromStr for PhaseProfile {
    type Err = SquboError;

    /// Parses `logistic:<steepness>` or `clamped:<half_width>`.
    fn from_str(s: &str) -> Result<Self, SquboError> {
        let bad = || {
            SquboError::InvalidArgument(format!(
                "invalid profile '{s}': expected logistic:<steepness> or clamped:<half_width>"
            ))
        };
        let (kind, param) = s.split_once(':').ok_or_else(bad)?;
        let value: f64 = param.trim().parse().map_err(|_| bad())?;
        match kind.trim() {
            "logistic" => Self::logistic(value),
            "clamped" => Self::clamped_linear(value),
            _ => Err(bad()),
        }
    }
}

/// Continuous parameters `theta`, one per spin. All entries are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseParams {
    theta: Vec<f64>,
}

impl PhaseParams {
    pub fn new(theta: Vec<f64>) -> Result<Self, SquboError> {
        if let Some(pos) = theta.iter().position(|t| !t.is_finite()) {
            return Err(SquboError::InvalidArgument(format!(
                "parameter at index {pos} is not finite"
            )));
        }
        Ok(Self { theta })
    }

    /// Wraps values known to be finite by construction.
    pub(crate) fn from_raw(theta: Vec<f64>) -> Self {
        Self { theta }
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.theta
    }
}

/// Pointwise image of the parameters under a profile: the phase positions
/// `r_i = R(theta_i)` and the unit phases `f_i = exp(-i * pi * r_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxedState {
    pub r: Vec<f64>,
    pub f_re: Vec<f64>,
    pub f_im: Vec<f64>,
}

/// Maps parameters to phase positions and unit phases.
pub fn relax(profile: PhaseProfile, params: &PhaseParams) -> RelaxedState {
    let r = profile_values(profile, params.theta());
    let f_re = r.iter().map(|&ri| (PI * ri).cos()).collect();
    let f_im = r.iter().map(|&ri| -(PI * ri).sin()).collect();
    RelaxedState { r, f_re, f_im }
}

/// Relaxed cost `-( sum_{i > j} q_ij cos(pi (r_i - r_j)) + trace(q) / 2 )`.
pub fn cost(
    instance: &SpinQuboInstance,
    params: &PhaseParams,
    profile: PhaseProfile,
) -> Result<f64, SquboError> {
    check_dims(instance, params)?;
    let r = profile_values(profile, params.theta());
    Ok(cost_from_values(instance, &r))
}

/// Analytic gradient of [`cost`]:
/// `d cost / d theta_k = pi * R'(theta_k) * sum_{j != k} q_kj sin(pi (r_k - r_j))`.
pub fn gradient(
    instance: &SpinQuboInstance,
    params: &PhaseParams,
    profile: PhaseProfile,
) -> Result<Vec<f64>, SquboError> {
    check_dims(instance, params)?;
    let r = profile_values(profile, params.theta());
    Ok(gradient_from_values(instance, profile, params.theta(), &r))
}

/// Rounds each parameter to a spin: `-1` where `R(theta_i) < 1/2`, else `+1`.
pub fn decode(params: &PhaseParams, profile: PhaseProfile) -> SpinAssignment {
    let spins = params
        .theta()
        .iter()
        .map(|&t| if profile.value(t) < 0.5 { -1 } else { 1 })
        .collect();
    SpinAssignment::new(spins).expect("spins are -1 or +1 by construction")
}

/// Mean of `2 * |r_i - 1/2|`: 0 when every phase sits at the undecided
/// midpoint, 1 when every phase has saturated to 0 or 1.
pub fn saturation(params: &PhaseParams, profile: PhaseProfile) -> f64 {
    let r = profile_values(profile, params.theta());
    saturation_from_values(&r)
}

fn check_dims(instance: &SpinQuboInstance, params: &PhaseParams) -> Result<(), SquboError> {
    if params.len() != instance.n() {
        return Err(SquboError::DimensionMismatch {
            expected: instance.n(),
            actual: params.len(),
        });
    }
    Ok(())
}

pub(crate) fn profile_values(profile: PhaseProfile, theta: &[f64]) -> Vec<f64> {
    theta.iter().map(|&t| profile.value(t)).collect()
}

pub(crate) fn cost_from_values(instance: &SpinQuboInstance, r: &[f64]) -> f64 {
    let mut acc = 0.0;
    for &(i, j, value) in instance.entries() {
        if i == j {
            acc += 0.5 * value;
        } else {
            acc += value * (PI * (r[i] - r[j])).cos();
        }
    }
    -acc
}

pub(crate) fn gradient_from_values(
    instance: &SpinQuboInstance,
    profile: PhaseProfile,
    theta: &[f64],
    r: &[f64],
) -> Vec<f64> {
    let mut g = vec![0.0; theta.len()];
    for &(i, j, value) in instance.entries() {
        if i == j {
            continue;
        }
        let t = value * (PI * (r[i] - r[j])).sin();
        g[i] += t;
        g[j] -= t;
    }
    for (gk, &tk) in g.iter_mut().zip(theta) {
        *gk *= PI * profile.derivative(tk);
    }
    g
}

pub(crate) fn saturation_from_values(r: &[f64]) -> f64 {
    if r.is_empty() {
        return 1.0;
    }
    r.iter().map(|&ri| 2.0 * (ri - 0.5).abs()).sum::<f64>() / r.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::energy;

    use approx::assert_relative_eq;
    use num_complex::Complex64;
    use rand::prelude::*;
    use rand_chacha::ChaCha12Rng;

    fn params(theta: &[f64]) -> PhaseParams {
        PhaseParams::new(theta.to_vec()).unwrap()
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

    /// Reference cost `-(1/2) f^H q f` via complex arithmetic over the dense
    /// matrix; the cosine form must agree with this.
    fn bilinear_cost_oracle(
        instance: &SpinQuboInstance,
        theta: &[f64],
        profile: PhaseProfile,
    ) -> f64 {
        let q = instance.dense();
        let f: Vec<Complex64> = theta
            .iter()
            .map(|&t| {
                let angle = -PI * profile.value(t);
                Complex64::new(angle.cos(), angle.sin())
            })
            .collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..instance.n() {
            for j in 0..instance.n() {
                acc += f[i].conj() * q[i][j] * f[j];
            }
        }
        -0.5 * acc.re
    }

    #[test]
    fn logistic_profile_shape() {
        let p = PhaseProfile::logistic(2.0).unwrap();
        assert_eq!(p.value(0.0), 0.5);
        assert!(p.value(10.0) > 0.999);
        assert!(p.value(-10.0) < 0.001);
        assert_relative_eq!(p.derivative(0.0), 0.5, max_relative = 1e-12);
    }

    #[test]
    fn clamped_profile_shape_and_kinks() {
        let p = PhaseProfile::clamped_linear(2.0).unwrap();
        assert_eq!(p.value(-3.0), 0.0);
        assert_eq!(p.value(3.0), 1.0);
        assert_eq!(p.value(0.0), 0.5);
        assert_eq!(p.value(1.0), 0.75);
        assert_eq!(p.derivative(0.0), 0.25);
        assert_eq!(p.derivative(2.0), 0.25);
        assert_eq!(p.derivative(-2.0), 0.25);
        assert_eq!(p.derivative(2.0000001), 0.0);
    }

    #[test]
    fn profiles_are_monotone_and_bounded() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for profile in [
            PhaseProfile::logistic(0.7).unwrap(),
            PhaseProfile::logistic(3.0).unwrap(),
            PhaseProfile::clamped_linear(0.5).unwrap(),
            PhaseProfile::clamped_linear(2.0).unwrap(),
        ] {
            let mut ts: Vec<f64> = (0..200).map(|_| rng.random_range(-6.0..=6.0)).collect();
            ts.sort_by(f64::total_cmp);
            let mut prev = -1.0;
            for &t in &ts {
                let v = profile.value(t);
                assert!((0.0..=1.0).contains(&v));
                assert!(v >= prev, "profile not monotone at t={t}");
                assert!(profile.derivative(t) >= 0.0);
                prev = v;
            }
        }
    }

    #[test]
    fn profile_derivative_matches_finite_differences() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let h = 1e-6;
        for profile in [
            PhaseProfile::logistic(1.0).unwrap(),
            PhaseProfile::logistic(2.5).unwrap(),
            PhaseProfile::clamped_linear(1.0).unwrap(),
            PhaseProfile::clamped_linear(3.0).unwrap(),
        ] {
            let kink = match profile {
                PhaseProfile::ClampedLinear { half_width } => Some(half_width),
                PhaseProfile::Logistic { .. } => None,
            };
            let mut checked = 0;
            while checked < 100 {
                let t: f64 = rng.random_range(-3.0..=3.0);
                if let Some(a) = kink {
                    if (t.abs() - a).abs() < 1e-4 {
                        continue;
                    }
                }
                let fd = (profile.value(t + h) - profile.value(t - h)) / (2.0 * h);
                let an = profile.derivative(t);
                assert!(
                    (an - fd).abs() <= 1e-6 * an.abs().max(fd.abs()).max(1e-4),
                    "{profile}: t={t}, analytic {an}, fd {fd}"
                );
                checked += 1;
            }
        }
    }

    #[test]
    fn parse_and_display_round_trip() {
        for text in ["logistic:2", "clamped:0.5", "logistic:0.25"] {
            let p: PhaseProfile = text.parse().unwrap();
            assert_eq!(p.to_string(), text);
        }
        assert!("logistic:-1".parse::<PhaseProfile>().is_err());
        assert!("clamped:0".parse::<PhaseProfile>().is_err());
        assert!("step:1".parse::<PhaseProfile>().is_err());
        assert!("logistic".parse::<PhaseProfile>().is_err());
        assert!("clamped:abc".parse::<PhaseProfile>().is_err());
    }

    #[test]
    fn relax_produces_unit_phases() {
        let profile = PhaseProfile::logistic(1.0).unwrap();
        let p = params(&[-2.0, -0.3, 0.0, 1.7]);
        let state = relax(profile, &p);
        for k in 0..p.len() {
            let norm = state.f_re[k] * state.f_re[k] + state.f_im[k] * state.f_im[k];
            assert_relative_eq!(norm, 1.0, max_relative = 1e-14);
            // r in [0, 1] puts the phase angle in [-pi, 0]: non-positive
            // imaginary part.
            assert!(state.f_im[k] <= 0.0);
            assert_relative_eq!(state.r[k], profile.value(p.theta()[k]), max_relative = 1e-15);
        }
    }

    #[test]
    fn cost_matches_bilinear_oracle() {
        let mut rng = ChaCha12Rng::seed_from_u64(19);
        for profile in [
            PhaseProfile::logistic(1.3).unwrap(),
            PhaseProfile::clamped_linear(1.0).unwrap(),
        ] {
            for _ in 0..30 {
                let n = rng.random_range(1..=10);
                let inst = random_dense(&mut rng, n);
                let theta: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..=3.0)).collect();
                let p = params(&theta);
                let got = cost(&inst, &p, profile).unwrap();
                let want = bilinear_cost_oracle(&inst, &theta, profile);
                assert!((got - want).abs() <= 1e-12, "cost {got}, oracle {want}");
            }
        }
    }

    #[test]
    fn cost_equals_energy_at_saturated_parameters() {
        let mut rng = ChaCha12Rng::seed_from_u64(29);
        let profile = PhaseProfile::clamped_linear(1.0).unwrap();
        for _ in 0..30 {
            let n = rng.random_range(1..=10);
            let inst = random_dense(&mut rng, n);
            // theta far outside the clamp: R is exactly 0 or 1.
            let theta: Vec<f64> =
                (0..n).map(|_| if rng.random::<bool>() { 5.0 } else { -5.0 }).collect();
            let p = params(&theta);
            let s = decode(&p, profile);
            let c = cost(&inst, &p, profile).unwrap();
            let e = energy(&inst, &s).unwrap();
            assert!((c - e).abs() <= 1e-10, "cost {c}, energy {e}");
            assert_eq!(saturation(&p, profile), 1.0);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        let h = 1e-6;
        for profile in [
            PhaseProfile::logistic(1.0).unwrap(),
            PhaseProfile::clamped_linear(1.0).unwrap(),
        ] {
            let kink = match profile {
                PhaseProfile::ClampedLinear { half_width } => Some(half_width),
                PhaseProfile::Logistic { .. } => None,
            };
            for _ in 0..20 {
                let n = rng.random_range(2..=8);
                let inst = random_dense(&mut rng, n);
                let theta: Vec<f64> = (0..n)
                    .map(|_| loop {
                        let t: f64 = rng.random_range(-2.0..=2.0);
                        let near_kink =
                            kink.is_some_and(|a| (t.abs() - a).abs() < 1e-4);
                        if !near_kink {
                            break t;
                        }
                    })
                    .collect();
                let p = params(&theta);
                let g = gradient(&inst, &p, profile).unwrap();
                for k in 0..n {
                    let mut plus = theta.clone();
                    let mut minus = theta.clone();
                    plus[k] += h;
                    minus[k] -= h;
                    let fd = (cost(&inst, &params(&plus), profile).unwrap()
                        - cost(&inst, &params(&minus), profile).unwrap())
                        / (2.0 * h);
                    let scale = g[k].abs().max(fd.abs());
                    assert!(
                        (g[k] - fd).abs() <= (1e-6 * scale).max(1e-7),
                        "{profile}: component {k}, analytic {}, fd {fd}",
                        g[k]
                    );
                }
            }
        }
    }

    #[test]
    fn gradient_vanishes_where_profile_is_flat() {
        let profile = PhaseProfile::clamped_linear(1.0).unwrap();
        let inst = SpinQuboInstance::new(2, vec![(0, 1, 1.0)]).unwrap();
        let p = params(&[4.0, -4.0]);
        let g = gradient(&inst, &p, profile).unwrap();
        assert_eq!(g, vec![0.0, 0.0]);
    }

    #[test]
    fn decode_follows_parameter_signs() {
        for profile in [
            PhaseProfile::logistic(2.0).unwrap(),
            PhaseProfile::clamped_linear(1.0).unwrap(),
        ] {
            let p = params(&[-1.5, -0.01, 0.0, 0.01, 1.5]);
            let s = decode(&p, profile);
            assert_eq!(s.spins(), &[-1, -1, 1, 1, 1]);
        }
    }

    #[test]
    fn saturation_ranges_from_undecided_to_locked() {
        let profile = PhaseProfile::clamped_linear(1.0).unwrap();
        assert_eq!(saturation(&params(&[0.0, 0.0]), profile), 0.0);
        assert_eq!(saturation(&params(&[9.0, -9.0]), profile), 1.0);
        let mid = saturation(&params(&[0.5, -0.5]), profile);
        assert_relative_eq!(mid, 0.5, max_relative = 1e-12);
    }

    #[test]
    fn operations_reject_wrong_dimensions() {
        let inst = SpinQuboInstance::new(3, vec![(0, 1, 1.0)]).unwrap();
        let profile = PhaseProfile::logistic(1.0).unwrap();
        let p = params(&[0.1, 0.2]);
        assert!(matches!(
            cost(&inst, &p, profile),
            Err(SquboError::DimensionMismatch { expected: 3, actual: 2 })
        ));
        assert!(gradient(&inst, &p, profile).is_err());
    }

    #[test]
    fn params_reject_non_finite_entries() {
        assert!(PhaseParams::new(vec![0.0, f64::INFINITY]).is_err());
        assert!(PhaseParams::new(vec![f64::NAN]).is_err());
    }
}
