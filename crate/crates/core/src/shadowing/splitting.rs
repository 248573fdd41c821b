use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::spectral::spectrum_report;

/// Eigenvector matrices with a larger condition number are rejected.
pub const EIGENBASIS_CONDITION_MAX: f64 = 1e8;

/// Number of powers measured when estimating `K_s` and `K_u`.
pub const POWER_HORIZON: usize = 50;

/// Stable/unstable decomposition of a hyperbolic operator.
///
/// The bounds satisfy `||(T P_s)^m P_s|| <= K_s rho_s^m` and
/// `||(T_u^-1)^m P_u|| <= K_u rho_u^-m` for `m <= POWER_HORIZON`.
#[derive(Debug, Clone)]
pub struct HyperbolicSplitting {
    pub stable_projector: ComplexMatrix,
    pub unstable_projector: ComplexMatrix,
    /// Largest stable eigenvalue modulus (0 when there is no stable part).
    pub stable_rate: f64,
    /// Smallest unstable eigenvalue modulus (infinite when there is no unstable part).
    pub unstable_rate: f64,
    pub stable_bound: f64,
    pub unstable_bound: f64,
    pub eigenbasis_condition: f64,
    /// `T P_s`.
    pub stable_map: ComplexMatrix,
    /// Inverse of `T` on the unstable subspace, zero on the stable one.
    pub unstable_inverse: ComplexMatrix,
}

impl HyperbolicSplitting {
    pub fn has_stable_part(&self) -> bool {
        self.stable_rate > 0.0
    }

    pub fn has_unstable_part(&self) -> bool {
        self.unstable_rate.is_finite()
    }

    /// `C = K_s / (1 - rho_s) + K_u rho_u / (rho_u - 1)`; shadows found by
    /// [`super::shadow_orbit`] stay within `C * delta` of the pseudo-orbit.
    pub fn shadowing_constant(&self) -> f64 {
        let stable = if self.has_stable_part() { self.stable_bound / (1.0 - self.stable_rate) } else { 0.0 };
        let unstable = if self.has_unstable_part() {
            self.unstable_bound * self.unstable_rate / (self.unstable_rate - 1.0)
        } else {
            0.0
        };
        stable + unstable
    }

    /// Bound (per unit defect) on the power terms beyond the measured horizon,
    /// `cond(V) (rho_s^(M+1) / (1 - rho_s) + rho_u^-(M+1) / (1 - 1/rho_u))`.
    pub fn tail_slack(&self) -> f64 {
        let m = (POWER_HORIZON + 1) as i32;
        let stable = if self.has_stable_part() { self.stable_rate.powi(m) / (1.0 - self.stable_rate) } else { 0.0 };
        let unstable =
            if self.has_unstable_part() { self.unstable_rate.powi(-m) / (1.0 - 1.0 / self.unstable_rate) } else { 0.0 };
        self.eigenbasis_condition * (stable + unstable)
    }
}

pub fn hyperbolic_splitting(t: &ComplexMatrix) -> Result<HyperbolicSplitting> {
    let n = t.require_square()?;
    let parts = linalg::svd(t)?;
    if parts.min_singular() <= parts.rank_tolerance() {
        return Err(Error::NotInvertible { min_singular: parts.min_singular(), tolerance: parts.rank_tolerance() });
    }
    let report = spectrum_report(t)?;
    if !report.hyperbolic {
        return Err(Error::NotHyperbolic { distance: report.circle_distance });
    }

    let eig = linalg::eigen_decompose(t)?;
    let condition = linalg::condition_number(&eig.vectors)?;
    if !(condition <= EIGENBASIS_CONDITION_MAX) {
        return Err(Error::IllConditionedEigenbasis { condition, threshold: EIGENBASIS_CONDITION_MAX });
    }
    let v = &eig.vectors;
    let v_inv = linalg::inverse(v)?;
    let zero = Complex64::new(0.0, 0.0);
    let spectral_sum = |weight: &dyn Fn(Complex64) -> Complex64| {
        let scaled = ComplexMatrix::from_fn(n, n, |i, j| v.get(i, j) * weight(eig.values[j]));
        &scaled * &v_inv
    };
    let stable = |z: Complex64| z.norm() < 1.0;
    let one = Complex64::new(1.0, 0.0);

    let stable_projector = spectral_sum(&|z| if stable(z) { one } else { zero });
    let unstable_projector = spectral_sum(&|z| if stable(z) { zero } else { one });
    let unstable_inverse = spectral_sum(&|z| if stable(z) { zero } else { one / z });
    let stable_map = t * &stable_projector;

    let stable_rate = eig.values.iter().filter(|z| stable(**z)).map(|z| z.norm()).fold(0.0, f64::max);
    let unstable_rate = eig.values.iter().filter(|z| !stable(**z)).map(|z| z.norm()).fold(f64::INFINITY, f64::min);

    let stable_bound = if stable_rate > 0.0 {
        max_normalized_power_norm(&stable_map.scale_real(1.0 / stable_rate), &stable_projector)?
    } else {
        0.0
    };
    let unstable_bound = if unstable_rate.is_finite() {
        max_normalized_power_norm(&unstable_inverse.scale_real(unstable_rate), &unstable_projector)?
    } else {
        0.0
    };

    Ok(HyperbolicSplitting {
        stable_projector,
        unstable_projector,
        stable_rate,
        unstable_rate,
        stable_bound,
        unstable_bound,
        eigenbasis_condition: condition,
        stable_map,
        unstable_inverse,
    })
}

/// `max_{0 <= m <= M} ||step^m start||`.
fn max_normalized_power_norm(step: &ComplexMatrix, start: &ComplexMatrix) -> Result<f64> {
    let mut current = start.clone();
    let mut best = linalg::operator_norm(&current)?;
    for _ in 0..POWER_HORIZON {
        current = step * &current;
        best = best.max(linalg::operator_norm(&current)?);
    }
    Ok(best)
}
