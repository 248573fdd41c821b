use serde::{Deserialize, Serialize};

use super::orbit::PseudoOrbit;
use super::shadow::{max_distance, residual, shadow_orbit, ShadowResult};
use super::splitting::hyperbolic_splitting;
use crate::aluthge::{aluthge_transform, conjugator, Conjugator, Lambda};
use crate::error::Result;
use crate::linalg::ComplexMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransferDirection {
    /// Shadow pseudo-orbits of `Delta_lambda(T)` using the splitting of `T`.
    ToTransform,
    /// Shadow pseudo-orbits of `T` using the splitting of `Delta_lambda(T)`.
    FromTransform,
}

/// Shadows a pseudo-orbit of `target = H source H^-1` by pulling it back
/// through `H^-1`, shadowing under `source` and pushing the shadow forward
/// through `H`. The distance bound grows by `||H|| ||H^-1||`.
pub fn shadow_through_conjugacy(
    target: &ComplexMatrix,
    source: &ComplexMatrix,
    conj: &Conjugator,
    orbit: &PseudoOrbit,
) -> Result<ShadowResult> {
    let pulled = orbit.mapped(&conj.h_inv, conj.h_inv_norm);
    let splitting = hyperbolic_splitting(source)?;
    let inner = shadow_orbit(source, &splitting, &pulled)?;
    let shadow_points: Vec<_> = inner.shadow_points.iter().map(|w| conj.h.apply(w)).collect();
    Ok(ShadowResult {
        epsilon: max_distance(&shadow_points, &orbit.points),
        orbit_residual: residual(target, &shadow_points),
        constant_bound: conj.condition() * inner.constant_bound,
        slack: conj.h_norm * inner.slack,
        delta: orbit.delta,
        bound: orbit.bound,
        measured_defect: super::orbit::orbit_defects(target, &orbit.points).into_iter().fold(0.0, f64::max),
        shadow_points,
    })
}

/// Shadows a pseudo-orbit of `Delta_lambda(T)` through `H = |T|^lambda`.
pub fn transfer_shadowing(
    t: &ComplexMatrix,
    lambda: Lambda,
    orbit_for_transform: &PseudoOrbit,
) -> Result<ShadowResult> {
    let conj = conjugator(t, lambda)?;
    let transformed = aluthge_transform(t, lambda)?;
    shadow_through_conjugacy(&transformed, t, &conj, orbit_for_transform)
}

/// Shadows a pseudo-orbit of `T` through `H^-1`, using `Delta_lambda(T)`'s splitting.
pub fn transfer_shadowing_back(t: &ComplexMatrix, lambda: Lambda, orbit_for_t: &PseudoOrbit) -> Result<ShadowResult> {
    let conj = conjugator(t, lambda)?.inverted();
    let transformed = aluthge_transform(t, lambda)?;
    shadow_through_conjugacy(t, &transformed, &conj, orbit_for_t)
}
