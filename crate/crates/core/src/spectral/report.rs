use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{self, complex_pairs, ComplexMatrix};

/// An eigenvalue is on the unit circle when `||z| - 1| <= HYPERBOLICITY_REL_TOL * (1 + r(T))`.
pub const HYPERBOLICITY_REL_TOL: f64 = 1e-8;

pub fn hyperbolicity_tolerance(spectral_radius: f64) -> f64 {
    HYPERBOLICITY_REL_TOL * (1.0 + spectral_radius)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    /// Sorted by decreasing modulus, then by argument.
    #[serde(with = "complex_pairs")]
    pub eigenvalues: Vec<Complex64>,
    pub spectral_radius: f64,
    /// `min | |z| - 1 |` over the eigenvalues.
    pub circle_distance: f64,
    pub hyperbolic: bool,
    pub tolerance: f64,
}

pub fn spectrum_report(t: &ComplexMatrix) -> Result<SpectrumReport> {
    let mut eigenvalues = linalg::eigenvalues(t)?;
    eigenvalues.sort_by(|a, b| b.norm().total_cmp(&a.norm()).then(a.arg().total_cmp(&b.arg())));
    let spectral_radius = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let circle_distance = eigenvalues.iter().map(|z| (z.norm() - 1.0).abs()).fold(f64::INFINITY, f64::min);
    let tolerance = hyperbolicity_tolerance(spectral_radius);
    Ok(SpectrumReport {
        eigenvalues,
        spectral_radius,
        circle_distance,
        hyperbolic: circle_distance > tolerance,
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aluthge::{aluthge_transform, Lambda};
    use crate::spectral::multiset_match;

    #[test]
    fn diagonal_report() {
        let r = spectrum_report(&ComplexMatrix::from_real_diagonal(&[2.0, 0.5])).unwrap();
        assert_eq!(r.spectral_radius, 2.0);
        assert_eq!(r.circle_distance, 0.5);
        assert!(r.hyperbolic);
        assert_eq!(r.eigenvalues[0], Complex64::new(2.0, 0.0));
    }

    #[test]
    fn rotation_is_not_hyperbolic() {
        let r = spectrum_report(&ComplexMatrix::from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]])).unwrap();
        assert!(r.circle_distance < 1e-15);
        assert!(!r.hyperbolic);
    }

    #[test]
    fn transform_keeps_reported_spectrum() {
        let t = ComplexMatrix::from_real_rows(&[&[1.0, 3.0, 0.0], &[0.0, 0.5, 2.0], &[0.2, 0.0, -1.5]]);
        let a = spectrum_report(&t).unwrap();
        let b = spectrum_report(&aluthge_transform(&t, Lambda::new(0.3).unwrap()).unwrap()).unwrap();
        assert!(multiset_match(&a.eigenvalues, &b.eigenvalues, 1e-10).unwrap().matched);
        assert_eq!(a.hyperbolic, b.hyperbolic);
    }

    #[test]
    fn serializes_eigenvalues_as_pairs() {
        let r = spectrum_report(&ComplexMatrix::from_real_diagonal(&[2.0, 0.5])).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["eigenvalues"][1], serde_json::json!([0.5, 0.0]));
        assert_eq!(v["hyperbolic"], true);
    }
}
