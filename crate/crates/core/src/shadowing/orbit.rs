use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ensembles::Sampler;
use crate::error::{Error, Result};
use crate::linalg::{self, complex_vectors, vector_norm, vector_sub, ComplexMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrbitMode {
    /// Independent points in a small ball around the origin.
    Ball,
    /// A true orbit with additive bounded noise.
    Noisy,
}

/// `x_0, ..., x_N` with `||x_{k+1} - T x_k|| <= delta` and `||x_k|| <= bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudoOrbit {
    #[serde(with = "complex_vectors")]
    pub points: Vec<Vec<Complex64>>,
    pub delta: f64,
    pub bound: f64,
    pub mode: OrbitMode,
    /// Noisy orbits of operators with expanding directions drift away from every ball.
    #[serde(default)]
    pub unbounded_risk: bool,
}

impl PseudoOrbit {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    /// Applies a linear map to every point, scaling `delta` and `bound` by `norm`.
    pub(crate) fn mapped(&self, m: &ComplexMatrix, norm: f64) -> PseudoOrbit {
        PseudoOrbit {
            points: self.points.iter().map(|x| m.apply(x)).collect(),
            delta: self.delta * norm,
            bound: self.bound * norm,
            mode: self.mode,
            unbounded_risk: self.unbounded_risk,
        }
    }
}

/// `||x_{k+1} - T x_k||` for each step.
pub fn orbit_defects(t: &ComplexMatrix, points: &[Vec<Complex64>]) -> Vec<f64> {
    points.windows(2).map(|w| vector_norm(&vector_sub(&w[1], &t.apply(&w[0])))).collect()
}

/// Ball-mode pseudo-orbit with `length + 1` points drawn uniformly from the
/// ball of radius `delta / (1 + ||T||)`; every defect is then at most `delta`.
/// Points depend linearly on `delta` for a fixed seed.
pub fn generate_pseudo_orbit(t: &ComplexMatrix, delta: f64, length: usize, seed: u64) -> Result<PseudoOrbit> {
    let dim = t.require_square()?;
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidDelta(delta));
    }
    let radius = delta / (1.0 + linalg::operator_norm(t)?);
    let mut sampler = Sampler::new(seed);
    let points = (0..=length).map(|_| sampler.ball_point(dim, radius)).collect();
    Ok(PseudoOrbit { points, delta, bound: radius, mode: OrbitMode::Ball, unbounded_risk: false })
}

/// `x_{k+1} = T x_k + e_k` with `e_k` drawn uniformly from the `delta`-ball.
pub fn generate_noisy_orbit(
    t: &ComplexMatrix,
    start: &[Complex64],
    delta: f64,
    length: usize,
    seed: u64,
) -> Result<PseudoOrbit> {
    let dim = t.require_square()?;
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::InvalidDelta(delta));
    }
    let mut sampler = Sampler::new(seed);
    let noise: Vec<Vec<Complex64>> = (0..length)
        .map(|_| if delta == 0.0 { vec![Complex64::new(0.0, 0.0); dim] } else { sampler.ball_point(dim, delta) })
        .collect();
    noisy_orbit_with_noise(t, start, &noise, delta)
}

/// Noisy orbit driven by explicit noise vectors, each of norm at most `delta`.
pub fn noisy_orbit_with_noise(
    t: &ComplexMatrix,
    start: &[Complex64],
    noise: &[Vec<Complex64>],
    delta: f64,
) -> Result<PseudoOrbit> {
    let dim = t.require_square()?;
    if start.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: start.len() });
    }
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::InvalidDelta(delta));
    }
    let mut points = vec![start.to_vec()];
    for e in noise {
        let next = linalg::vector_add(&t.apply(points.last().unwrap()), e);
        points.push(next);
    }
    let bound = points.iter().map(|x| vector_norm(x)).fold(0.0, f64::max);
    let spectral_radius = linalg::eigenvalues(t)?.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(PseudoOrbit { points, delta, bound, mode: OrbitMode::Noisy, unbounded_risk: spectral_radius > 1.0 })
}
