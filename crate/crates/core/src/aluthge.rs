//! lambda-Aluthge transforms, their iterates and the similarity that links an
//! invertible operator to its transform.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};

/// Exponent of the transform, strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Lambda(f64);

impl Lambda {
    /// The classical Aluthge transform.
    pub const HALF: Lambda = Lambda(0.5);

    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value < 1.0 {
            Ok(Self(value))
        } else {
            Err(Error::InvalidLambda(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Lambda {
    type Error = Error;
    fn try_from(value: f64) -> Result<Self> {
        Lambda::new(value)
    }
}

impl From<Lambda> for f64 {
    fn from(l: Lambda) -> f64 {
        l.0
    }
}

/// Exponents used throughout the property suites.
pub const STANDARD_LAMBDAS: [f64; 5] = [0.1, 0.25, 0.5, 0.75, 0.9];

/// Iterates stop once the normality defect falls below this multiple of `||T||^2`.
pub const EARLY_STOP_REL: f64 = 1e-12;

/// `|T|^lambda U |T|^(1 - lambda)`.
pub fn aluthge_transform(t: &ComplexMatrix, lambda: Lambda) -> Result<ComplexMatrix> {
    let polar = linalg::polar_decompose(t)?;
    let left = linalg::psd_power(&polar.modulus, lambda.value())?;
    let right = linalg::psd_power(&polar.modulus, 1.0 - lambda.value())?;
    Ok(&(&left * &polar.isometry_part) * &right)
}

/// `||Delta_lambda(alpha T) - |alpha| Delta_lambda(T)||` in operator norm.
pub fn scale_homogeneity_check(t: &ComplexMatrix, alpha: Complex64, lambda: Lambda) -> Result<f64> {
    let scaled = aluthge_transform(&t.scale(alpha), lambda)?;
    let reference = aluthge_transform(t, lambda)?.scale_real(alpha.norm());
    linalg::operator_norm(&(&scaled - &reference))
}

/// `||Delta_lambda(alpha T) - alpha Delta_lambda(T)||` in operator norm.
pub fn phase_homogeneity_check(t: &ComplexMatrix, alpha: Complex64, lambda: Lambda) -> Result<f64> {
    let scaled = aluthge_transform(&t.scale(alpha), lambda)?;
    let reference = aluthge_transform(t, lambda)?.scale(alpha);
    linalg::operator_norm(&(&scaled - &reference))
}

/// `||T^H T - T T^H||` in operator norm.
pub fn normality_defect(t: &ComplexMatrix) -> Result<f64> {
    t.require_square()?;
    let adj = t.adjoint();
    linalg::operator_norm(&(&(&adj * t) - &(t * &adj)))
}

/// Spectral radius `max |lambda|`.
pub fn spectral_radius(t: &ComplexMatrix) -> Result<f64> {
    Ok(linalg::eigenvalues(t)?.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

#[derive(Debug, Clone)]
pub struct IterateTrace {
    /// `Delta^(0)(T) = T, Delta^(1)(T), ...`
    pub iterates: Vec<ComplexMatrix>,
    pub operator_norms: Vec<f64>,
    pub normality_defects: Vec<f64>,
    /// `r(T)`, the limit of the operator norms.
    pub spectral_radius: f64,
    pub lambda: Lambda,
    /// True when the defect threshold ended the run before `n_max`.
    pub stopped_early: bool,
}

impl IterateTrace {
    pub fn len(&self) -> usize {
        self.iterates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iterates.is_empty()
    }

    pub fn last(&self) -> &ComplexMatrix {
        self.iterates.last().expect("trace always holds T itself")
    }

    pub fn final_norm(&self) -> f64 {
        *self.operator_norms.last().expect("non-empty trace")
    }

    pub fn final_defect(&self) -> f64 {
        *self.normality_defects.last().expect("non-empty trace")
    }

    /// Largest increase between consecutive operator norms (0 when monotone).
    pub fn max_norm_increase(&self) -> f64 {
        self.operator_norms.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// CSV with header `step,operator_norm,normality_defect`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,operator_norm,normality_defect\n");
        for (step, (norm, defect)) in self.operator_norms.iter().zip(&self.normality_defects).enumerate() {
            writeln!(out, "{step},{norm:e},{defect:e}").expect("writing to a String");
        }
        out
    }
}

/// Runs `Delta_lambda` up to `n_max` times, recomputing the polar
/// decomposition at every step.
pub fn aluthge_iterates(t: &ComplexMatrix, lambda: Lambda, n_max: usize) -> Result<IterateTrace> {
    t.require_square()?;
    let norm0 = linalg::operator_norm(t)?;
    let threshold = EARLY_STOP_REL * norm0 * norm0;

    let mut iterates = vec![t.clone()];
    let mut operator_norms = vec![norm0];
    let mut normality_defects = vec![normality_defect(t)?];
    let mut stopped_early = false;

    for _ in 0..n_max {
        if *normality_defects.last().unwrap() < threshold {
            stopped_early = true;
            break;
        }
        let next = aluthge_transform(iterates.last().unwrap(), lambda)?;
        operator_norms.push(linalg::operator_norm(&next)?);
        normality_defects.push(normality_defect(&next)?);
        iterates.push(next);
    }
    Ok(IterateTrace {
        iterates,
        operator_norms,
        normality_defects,
        spectral_radius: spectral_radius(t)?,
        lambda,
        stopped_early,
    })
}

/// `H = |T|^lambda` together with its inverse; `H T H^-1 = Delta_lambda(T)`
/// for invertible `T`. The norms of `H` and `H^-1` are the Lipschitz
/// constants of the conjugacy and its inverse.
#[derive(Debug, Clone)]
pub struct Conjugator {
    pub h: ComplexMatrix,
    pub h_inv: ComplexMatrix,
    pub h_norm: f64,
    pub h_inv_norm: f64,
}

impl Conjugator {
    pub fn condition(&self) -> f64 {
        self.h_norm * self.h_inv_norm
    }

    /// `H X H^-1`.
    pub fn conjugate(&self, x: &ComplexMatrix) -> ComplexMatrix {
        &(&self.h * x) * &self.h_inv
    }

    /// The same similarity with the roles of `H` and `H^-1` swapped.
    pub fn inverted(&self) -> Conjugator {
        Conjugator { h: self.h_inv.clone(), h_inv: self.h.clone(), h_norm: self.h_inv_norm, h_inv_norm: self.h_norm }
    }
}

/// Builds `H = |T|^lambda` from the singular value decomposition of `T`.
pub fn conjugator(t: &ComplexMatrix, lambda: Lambda) -> Result<Conjugator> {
    let parts = linalg::svd(t)?;
    let tolerance = parts.rank_tolerance();
    let smin = parts.min_singular();
    if smin <= tolerance {
        return Err(Error::NotInvertible { min_singular: smin, tolerance });
    }
    let n = parts.singular_values.len();
    let v = &parts.right;
    let power = |exp: f64| {
        let scaled = ComplexMatrix::from_fn(n, n, |i, j| v.get(i, j) * parts.singular_values[j].powf(exp));
        linalg::hermitian_part(&(&scaled * &v.adjoint()))
    };
    let l = lambda.value();
    Ok(Conjugator { h: power(l), h_inv: power(-l), h_norm: parts.max_singular().powf(l), h_inv_norm: smin.powf(-l) })
}
