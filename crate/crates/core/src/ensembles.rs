//! Seeded random-matrix ensembles.
//!
//! Every draw comes from ChaCha20 seeded with a 64-bit integer, so a spec
//! always reproduces the same matrix bit for bit. Trial seeds for a suite are
//! derived from the base seed by a counter passed through SplitMix64.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};

/// Recorded in every report so runs can be reproduced by other implementations.
pub const RNG_ALGORITHM: &str = "chacha20: rand_chacha ChaCha20Rng::seed_from_u64; \
uniform = 53-bit mantissa in [0,1); normal = Box-Muller (cos branch); \
trial seed = splitmix64(seed + index * 0x9E3779B97F4A7C15)";

pub const DEFAULT_COND_CAP: f64 = 1e4;
pub const DEFAULT_GAP: f64 = 0.2;
const MAX_RESAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnsembleKind {
    Invertible,
    Hyperbolic,
    Normal,
    Unitary,
    Shift,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub dim: usize,
    pub seed: u64,
    /// Minimum distance of eigenvalue moduli from 1 (hyperbolic only).
    #[serde(default = "default_gap")]
    pub gap: f64,
    /// Upper bound on the condition number of generated matrices and conjugators.
    #[serde(default = "default_cond_cap")]
    pub cond_cap: f64,
    /// Subdiagonal weights (shift only, length `dim - 1`).
    #[serde(default)]
    pub weights: Vec<f64>,
}

fn default_gap() -> f64 {
    DEFAULT_GAP
}

fn default_cond_cap() -> f64 {
    DEFAULT_COND_CAP
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind, dim: usize, seed: u64) -> Self {
        Self { kind, dim, seed, gap: DEFAULT_GAP, cond_cap: DEFAULT_COND_CAP, weights: Vec::new() }
    }

    pub fn with_gap(mut self, gap: f64) -> Self {
        self.gap = gap;
        self
    }

    pub fn with_cond_cap(mut self, cond_cap: f64) -> Self {
        self.cond_cap = cond_cap;
        self
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Self {
        self.weights = weights;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidSpec("dim must be positive".into()));
        }
        if !(self.cond_cap >= 1.0) {
            return Err(Error::InvalidSpec(format!("cond_cap {} must be >= 1", self.cond_cap)));
        }
        match self.kind {
            EnsembleKind::Hyperbolic if !(self.gap > 0.0 && self.gap < 1.0) => {
                Err(Error::InvalidSpec(format!("hyperbolic gap {} must lie in (0, 1)", self.gap)))
            }
            EnsembleKind::Shift if self.weights.len() + 1 != self.dim => Err(Error::InvalidSpec(format!(
                "shift needs dim - 1 = {} weights, got {}",
                self.dim - 1,
                self.weights.len()
            ))),
            EnsembleKind::Shift if self.weights.iter().any(|w| !w.is_finite()) => {
                Err(Error::InvalidSpec("shift weights must be finite".into()))
            }
            _ => Ok(()),
        }
    }
}

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for trial `index` of a run started from `seed`.
pub fn trial_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

/// Thin wrapper fixing how uniforms, normals and geometric samples are drawn.
pub struct Sampler {
    rng: ChaCha20Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha20Rng::seed_from_u64(seed) }
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `lo..=hi`.
    pub fn integer_in(&mut self, lo: usize, hi: usize) -> usize {
        lo + ((self.uniform() * (hi - lo + 1) as f64) as usize).min(hi - lo)
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
    }

    /// Standard complex Gaussian, `E|z|^2 = 1`.
    pub fn complex_normal(&mut self) -> Complex64 {
        Complex64::new(self.normal(), self.normal()) * std::f64::consts::FRAC_1_SQRT_2
    }

    pub fn gaussian_vector(&mut self, dim: usize) -> Vec<Complex64> {
        (0..dim).map(|_| self.complex_normal()).collect()
    }

    pub fn unit_vector(&mut self, dim: usize) -> Vec<Complex64> {
        loop {
            let g = self.gaussian_vector(dim);
            let norm = linalg::vector_norm(&g);
            if norm > 1e-300 {
                return g.into_iter().map(|z| z / norm).collect();
            }
        }
    }

    /// Uniform point in the closed ball of radius `radius` in `C^dim`.
    pub fn ball_point(&mut self, dim: usize, radius: f64) -> Vec<Complex64> {
        let direction = self.unit_vector(dim);
        let r = radius * self.uniform().powf(1.0 / (2 * dim) as f64);
        direction.into_iter().map(|z| z * r).collect()
    }

    pub fn gaussian_matrix(&mut self, dim: usize) -> ComplexMatrix {
        let entries: Vec<Complex64> = (0..dim * dim).map(|_| self.complex_normal()).collect();
        ComplexMatrix::from_row_major(dim, dim, &entries).expect("square buffer")
    }

    /// Haar-distributed unitary via QR of a Gaussian matrix with phase fix.
    pub fn unitary(&mut self, dim: usize) -> ComplexMatrix {
        let g = self.gaussian_matrix(dim);
        let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
        for j in 0..dim {
            let mut x = g.column(j);
            for _ in 0..2 {
                for q in &cols {
                    let proj: Complex64 = q.iter().zip(&x).map(|(a, b)| a.conj() * b).sum();
                    for (xi, qi) in x.iter_mut().zip(q) {
                        *xi -= proj * qi;
                    }
                }
            }
            let norm = linalg::vector_norm(&x);
            cols.push(x.into_iter().map(|z| z / norm).collect());
        }
        ComplexMatrix::from_fn(dim, dim, |i, j| cols[j][i])
    }
}

pub fn sample_matrix(spec: &EnsembleSpec) -> Result<ComplexMatrix> {
    spec.validate()?;
    let n = spec.dim;
    let mut s = Sampler::new(spec.seed);
    match spec.kind {
        EnsembleKind::Unitary => Ok(s.unitary(n)),
        EnsembleKind::Normal => {
            let q = s.unitary(n);
            let diag: Vec<Complex64> = (0..n).map(|_| s.complex_normal()).collect();
            Ok(&(&q * &ComplexMatrix::from_diagonal(&diag)) * &q.adjoint())
        }
        EnsembleKind::Shift => Ok(ComplexMatrix::from_fn(n, n, |i, j| {
            if i == j + 1 {
                Complex64::new(spec.weights[j], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })),
        EnsembleKind::Invertible => {
            for _ in 0..MAX_RESAMPLES {
                let m = s.gaussian_matrix(n);
                if well_conditioned(&m, spec.cond_cap)? {
                    return Ok(m);
                }
            }
            Err(Error::InvalidSpec(format!("no invertible sample met cond_cap {}", spec.cond_cap)))
        }
        EnsembleKind::Hyperbolic => {
            let inner = 1.0 - spec.gap;
            let outer = 1.0 + spec.gap;
            // Open intervals away from the excluded annulus.
            let eigenvalues: Vec<Complex64> = (0..n)
                .map(|_| {
                    let unstable = s.uniform() < 0.5;
                    let modulus = if unstable {
                        s.uniform_in(outer * (1.0 + 1e-9), 2.0 * outer)
                    } else {
                        s.uniform_in(0.25 * inner, inner * (1.0 - 1e-9))
                    };
                    Complex64::from_polar(modulus, s.uniform_in(0.0, TAU))
                })
                .collect();
            let diag = ComplexMatrix::from_diagonal(&eigenvalues);
            for _ in 0..MAX_RESAMPLES {
                let basis = s.gaussian_matrix(n);
                if well_conditioned(&basis, spec.cond_cap)? {
                    let inv = linalg::inverse(&basis)?;
                    return Ok(&(&basis * &diag) * &inv);
                }
            }
            Err(Error::InvalidSpec(format!("no eigenbasis met cond_cap {}", spec.cond_cap)))
        }
    }
}

fn well_conditioned(m: &ComplexMatrix, cap: f64) -> Result<bool> {
    let parts = linalg::svd(m)?;
    let smin = parts.min_singular();
    Ok(smin > parts.rank_tolerance() && parts.max_singular() / smin <= cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aluthge::normality_defect;

    #[test]
    fn identical_specs_are_bit_identical() {
        for kind in [EnsembleKind::Invertible, EnsembleKind::Hyperbolic, EnsembleKind::Normal, EnsembleKind::Unitary] {
            let spec = EnsembleSpec::new(kind, 5, 42);
            assert_eq!(sample_matrix(&spec).unwrap(), sample_matrix(&spec).unwrap());
        }
    }

    #[test]
    fn different_seeds_differ() {
        let a = sample_matrix(&EnsembleSpec::new(EnsembleKind::Invertible, 3, 1)).unwrap();
        let b = sample_matrix(&EnsembleSpec::new(EnsembleKind::Invertible, 3, 2)).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn normal_samples_are_normal() {
        for seed in 0..5 {
            let m = sample_matrix(&EnsembleSpec::new(EnsembleKind::Normal, 4, seed)).unwrap();
            assert!(normality_defect(&m).unwrap() < 1e-10);
        }
    }

    #[test]
    fn unitary_samples_are_unitary() {
        let u = sample_matrix(&EnsembleSpec::new(EnsembleKind::Unitary, 6, 3)).unwrap();
        assert!((&(&u.adjoint() * &u) - &ComplexMatrix::identity(6)).frobenius_norm() < 1e-13);
    }

    #[test]
    fn hyperbolic_moduli_avoid_the_annulus() {
        for seed in 0..10 {
            let spec = EnsembleSpec::new(EnsembleKind::Hyperbolic, 6, seed).with_gap(0.2);
            let m = sample_matrix(&spec).unwrap();
            for z in linalg::eigenvalues(&m).unwrap() {
                let r = z.norm();
                assert!(!(0.8..=1.2).contains(&r), "modulus {r}");
            }
        }
    }

    #[test]
    fn invertible_samples_respect_cond_cap() {
        let spec = EnsembleSpec::new(EnsembleKind::Invertible, 8, 9).with_cond_cap(50.0);
        let m = sample_matrix(&spec).unwrap();
        assert!(linalg::condition_number(&m).unwrap() <= 50.0);
    }

    #[test]
    fn unit_shift_is_nilpotent() {
        let spec = EnsembleSpec::new(EnsembleKind::Shift, 5, 0).with_weights(vec![1.0; 4]);
        let m = sample_matrix(&spec).unwrap();
        for z in linalg::eigenvalues(&m).unwrap() {
            assert_eq!(z.norm(), 0.0);
        }
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(sample_matrix(&EnsembleSpec::new(EnsembleKind::Shift, 3, 0)).is_err());
        assert!(sample_matrix(&EnsembleSpec::new(EnsembleKind::Hyperbolic, 3, 0).with_gap(0.0)).is_err());
        assert!(sample_matrix(&EnsembleSpec::new(EnsembleKind::Normal, 0, 0)).is_err());
    }

    #[test]
    fn spec_json_field_names() {
        let spec = EnsembleSpec::new(EnsembleKind::Shift, 3, 5).with_weights(vec![1.0, 2.0]);
        let v = serde_json::to_value(&spec).unwrap();
        assert_eq!(v["kind"], "shift");
        assert_eq!(v["weights"], serde_json::json!([1.0, 2.0]));
        let back: EnsembleSpec = serde_json::from_value(v).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn ball_points_stay_inside() {
        let mut s = Sampler::new(11);
        for _ in 0..200 {
            assert!(linalg::vector_norm(&s.ball_point(3, 0.25)) <= 0.25);
        }
    }

    #[test]
    fn integer_range_is_inclusive() {
        let mut s = Sampler::new(3);
        let draws: Vec<usize> = (0..500).map(|_| s.integer_in(2, 4)).collect();
        assert!(draws.iter().all(|d| (2..=4).contains(d)));
        assert!(draws.contains(&2) && draws.contains(&4));
    }
}
