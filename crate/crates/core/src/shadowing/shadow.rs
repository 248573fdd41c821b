use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::orbit::PseudoOrbit;
use super::splitting::HyperbolicSplitting;
use crate::error::{Error, Result};
use crate::linalg::{self, complex_vectors, vector_norm, vector_sub, ComplexMatrix};

/// A shadow counts as a true orbit when its residual is at most
/// `TRUE_ORBIT_REL_TOL * (1 + ||T||) * bound`.
pub const TRUE_ORBIT_REL_TOL: f64 = 1e-9;

/// Relative allowance for roundoff in the shadow-distance bound.
const ROUNDOFF_REL: f64 = 1e-9;

pub fn true_orbit_tolerance(t_norm: f64, bound: f64) -> f64 {
    TRUE_ORBIT_REL_TOL * (1.0 + t_norm) * bound
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShadowResult {
    #[serde(with = "complex_vectors")]
    pub shadow_points: Vec<Vec<Complex64>>,
    /// `max_k ||y_k - x_k||`.
    pub epsilon: f64,
    /// `max_k ||y_{k+1} - T y_k||`.
    pub orbit_residual: f64,
    /// Guaranteed ratio `epsilon / delta`.
    pub constant_bound: f64,
    /// Additive allowance on top of `constant_bound * delta` (truncated power
    /// tail beyond the measured horizon plus roundoff).
    pub slack: f64,
    /// Defect bound of the pseudo-orbit that was shadowed.
    pub delta: f64,
    /// Radius bound of that pseudo-orbit.
    pub bound: f64,
    /// Largest defect actually present in the pseudo-orbit.
    pub measured_defect: f64,
}

impl ShadowResult {
    /// `epsilon <= constant_bound * delta + slack`.
    pub fn within_bound(&self) -> bool {
        self.epsilon <= self.constant_bound * self.delta + self.slack
    }
}

/// Shadows a pseudo-orbit of `T` by a true orbit.
///
/// With defects `e_k = x_{k+1} - T x_k`, the correction is
/// `c_k = -sum_{j<k} (T P_s)^{k-1-j} P_s e_j + sum_{j>=k} T_u^{k-1-j} P_u e_j`
/// and `y_k = x_k + c_k`. Defects outside the finite segment are taken as zero.
pub fn shadow_orbit(t: &ComplexMatrix, splitting: &HyperbolicSplitting, orbit: &PseudoOrbit) -> Result<ShadowResult> {
    let dim = t.require_square()?;
    if orbit.is_empty() {
        return Err(Error::LengthMismatch { left: 0, right: 1 });
    }
    if let Some(bad) = orbit.points.iter().find(|x| x.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: bad.len() });
    }
    let points = &orbit.points;
    let n = points.len();
    let defects: Vec<Vec<Complex64>> = points.windows(2).map(|w| vector_sub(&w[1], &t.apply(&w[0]))).collect();
    let measured_defect = defects.iter().map(|e| vector_norm(e)).fold(0.0, f64::max);

    // Forward accumulation of the stable part.
    let mut stable = vec![vec![Complex64::new(0.0, 0.0); dim]; n];
    for k in 0..n - 1 {
        let pushed = splitting.stable_map.apply(&stable[k]);
        let injected = splitting.stable_projector.apply(&defects[k]);
        stable[k + 1] = linalg::vector_add(&pushed, &injected);
    }
    // Backward accumulation of the unstable part.
    let mut unstable = vec![vec![Complex64::new(0.0, 0.0); dim]; n];
    for k in (0..n - 1).rev() {
        let injected = splitting.unstable_projector.apply(&defects[k]);
        unstable[k] = splitting.unstable_inverse.apply(&linalg::vector_add(&injected, &unstable[k + 1]));
        if unstable[k].iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Overflow(format!("unstable back-substitution at step {k}")));
        }
    }

    let shadow_points: Vec<Vec<Complex64>> = (0..n)
        .map(|k| points[k].iter().zip(&stable[k]).zip(&unstable[k]).map(|((x, s), u)| x - s + u).collect())
        .collect();

    let epsilon = max_distance(&shadow_points, points);
    let orbit_residual = residual(t, &shadow_points);
    let constant_bound = splitting.shadowing_constant();
    let slack = (splitting.tail_slack() + ROUNDOFF_REL * constant_bound) * orbit.delta.max(measured_defect);
    Ok(ShadowResult {
        shadow_points,
        epsilon,
        orbit_residual,
        constant_bound,
        slack,
        delta: orbit.delta,
        bound: orbit.bound,
        measured_defect,
    })
}

pub(crate) fn max_distance(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| vector_norm(&vector_sub(x, y))).fold(0.0, f64::max)
}

pub(crate) fn residual(t: &ComplexMatrix, points: &[Vec<Complex64>]) -> f64 {
    super::orbit::orbit_defects(t, points).into_iter().fold(0.0, f64::max)
}

/// Checks that `shadow` is a true orbit of `T` (within the true-orbit
/// tolerance) staying within `eps_claim` of `orbit`.
pub fn verify_shadowing(t: &ComplexMatrix, orbit: &PseudoOrbit, shadow: &ShadowResult, eps_claim: f64) -> Result<bool> {
    if orbit.len() != shadow.shadow_points.len() {
        return Err(Error::LengthMismatch { left: orbit.len(), right: shadow.shadow_points.len() });
    }
    let tolerance = true_orbit_tolerance(linalg::operator_norm(t)?, orbit.bound);
    let res = residual(t, &shadow.shadow_points);
    let eps = max_distance(&shadow.shadow_points, &orbit.points);
    Ok(res <= tolerance && eps <= eps_claim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shadowing::{generate_noisy_orbit, generate_pseudo_orbit, hyperbolic_splitting, OrbitMode};

    fn constant_orbit(value: f64, delta: f64, len: usize) -> PseudoOrbit {
        PseudoOrbit {
            points: vec![vec![Complex64::new(value, 0.0)]; len + 1],
            delta,
            bound: value.abs(),
            mode: OrbitMode::Noisy,
            unbounded_risk: false,
        }
    }

    #[test]
    fn scalar_stable_case_matches_geometric_series() {
        let t = ComplexMatrix::from_real_diagonal(&[0.5]);
        let split = hyperbolic_splitting(&t).unwrap();
        let result = shadow_orbit(&t, &split, &constant_orbit(0.02, 0.01, 200)).unwrap();
        // delta / (1 - 1/2)
        assert!((result.epsilon - 0.02).abs() < 1e-12);
        assert!(result.orbit_residual < 1e-17);
        assert!(result.shadow_points.last().unwrap()[0].norm() < 1e-15);
    }

    #[test]
    fn scalar_unstable_case_matches_geometric_series() {
        let t = ComplexMatrix::from_real_diagonal(&[2.0]);
        let split = hyperbolic_splitting(&t).unwrap();
        let c = 0.3;
        let result = shadow_orbit(&t, &split, &constant_orbit(c, c, 200)).unwrap();
        // delta / (2 - 1)
        assert!((result.epsilon - c).abs() < 1e-12);
        assert!(result.shadow_points[0][0].norm() < 1e-15);
    }

    #[test]
    fn true_orbit_is_its_own_shadow() {
        let t = ComplexMatrix::from_real_rows(&[&[0.5, 1.0], &[0.0, 1.5]]);
        let split = hyperbolic_splitting(&t).unwrap();
        let x0 = [Complex64::new(1.0, 0.0), Complex64::new(0.0, -1.0)];
        let orbit = generate_noisy_orbit(&t, &x0, 0.0, 30, 0).unwrap();
        let result = shadow_orbit(&t, &split, &orbit).unwrap();
        assert_eq!(result.epsilon, 0.0);
        assert!(verify_shadowing(&t, &orbit, &result, 0.0).unwrap());
    }

    #[test]
    fn ball_orbit_shadow_is_verified_and_bounded() {
        let t = ComplexMatrix::from_real_rows(&[&[1.8, 0.7, 0.0], &[0.0, 0.3, 0.4], &[0.2, 0.0, -0.6]]);
        let split = hyperbolic_splitting(&t).unwrap();
        let orbit = generate_pseudo_orbit(&t, 1e-2, 200, 17).unwrap();
        let result = shadow_orbit(&t, &split, &orbit).unwrap();
        assert!(result.within_bound());
        let claim = result.constant_bound * orbit.delta + result.slack;
        assert!(verify_shadowing(&t, &orbit, &result, claim).unwrap());

        let mut tampered = result.clone();
        tampered.shadow_points[100][0] += Complex64::new(10.0 * claim, 0.0);
        assert!(!verify_shadowing(&t, &orbit, &tampered, claim).unwrap());
    }

    #[test]
    fn length_mismatch_is_reported() {
        let t = ComplexMatrix::from_real_diagonal(&[0.5]);
        let split = hyperbolic_splitting(&t).unwrap();
        let orbit = constant_orbit(0.02, 0.01, 10);
        let mut result = shadow_orbit(&t, &split, &orbit).unwrap();
        result.shadow_points.pop();
        assert!(matches!(verify_shadowing(&t, &orbit, &result, 1.0), Err(Error::LengthMismatch { .. })));
    }
}
