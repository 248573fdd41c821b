//! Quasi-hyperbolicity verdicts.
//!
//! The spectral verdict asks whether the spectrum misses the unit circle. The
//! definitional verdict searches the unit sphere for a vector violating
//! `max(||T^{2n} x||, ||x||) >= 2 ||T^n x||`; it can only refute, so a
//! positive answer means "no counterexample within the search budget".
//!
//! Besides random multistart the search is seeded with minimum eigenvectors of
//! `theta Q1 + (1 - theta) Q2`, where `Q1 = B^H B - 4 A^H A` and
//! `Q2 = I - 4 A^H A` (`A = T^n`, `B = T^{2n}`). A vector is a witness exactly
//! when both forms are negative on it, and the concave dual function
//! `h(theta) = lambda_min(theta Q1 + (1 - theta) Q2)` locates such vectors.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::report::spectrum_report;
use crate::ensembles::Sampler;
use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_eigen, opt_complex_pairs, vector_norm, ComplexMatrix};

/// Powers whose entries exceed this magnitude abort the exponent.
pub const POWER_OVERFLOW_LIMIT: f64 = 1e150;

/// A candidate counts as a witness only if `f(x) < -WITNESS_REL_TOL * scale`.
const WITNESS_REL_TOL: f64 = 1e-10;

const DUAL_SEARCH_STEPS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictMethod {
    Spectral,
    Definitional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Random unit vectors drawn per exponent.
    pub starts: usize,
    /// Local refinement steps per refined candidate.
    pub refinement_steps: usize,
    /// How many of the best candidates get refined.
    pub refined_candidates: usize,
}

impl SearchBudget {
    pub const STANDARD: SearchBudget = SearchBudget { starts: 32, refinement_steps: 200, refined_candidates: 4 };
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self::STANDARD
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiHyperbolicVerdict {
    pub verdict: bool,
    pub method: VerdictMethod,
    /// Smallest exponent for which no counterexample was found.
    pub exponent: Option<usize>,
    #[serde(with = "opt_complex_pairs")]
    pub witness: Option<Vec<Complex64>>,
    /// Spectral: `circle_distance - tolerance`. Definitional: smallest value of
    /// `max(||T^{2n}x||, ||x||) - 2||T^n x||` found for the reported exponent.
    pub margin: f64,
    /// Exponent the witness refutes (definitional, negative verdicts).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_exponent: Option<usize>,
    /// A definitional "true" is always budget-limited; this records that.
    #[serde(default)]
    pub budget_exhausted: bool,
    /// `max_theta h(theta)` for the reported exponent (definitional only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual_bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

pub fn is_quasi_hyperbolic_spectral(t: &ComplexMatrix) -> Result<QuasiHyperbolicVerdict> {
    let report = spectrum_report(t)?;
    Ok(QuasiHyperbolicVerdict {
        verdict: report.hyperbolic,
        method: VerdictMethod::Spectral,
        exponent: None,
        witness: None,
        margin: report.circle_distance - report.tolerance,
        witness_exponent: None,
        budget_exhausted: false,
        dual_bound: None,
        diagnostics: Vec::new(),
    })
}

/// Outcome of the search for one exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentCheck {
    pub exponent: usize,
    /// Smallest `f(x)` found on the unit sphere.
    pub min_margin: f64,
    /// Minimizer of the search; a counterexample when `falsified`.
    pub best_vector: Vec<Complex64>,
    pub falsified: bool,
    pub dual_bound: f64,
}

/// `max(||B x||, ||x||) - 2 ||A x||` for a unit vector `x`.
fn objective(a: &ComplexMatrix, b: &ComplexMatrix, x: &[Complex64]) -> f64 {
    vector_norm(&b.apply(x)).max(vector_norm(x)) - 2.0 * vector_norm(&a.apply(x))
}

fn normalize(x: Vec<Complex64>) -> Vec<Complex64> {
    let n = vector_norm(&x);
    x.into_iter().map(|z| z / n).collect()
}

/// `T^e` by repeated squaring; `None` once an intermediate exceeds the limit.
fn checked_power(t: &ComplexMatrix, mut e: usize) -> Option<ComplexMatrix> {
    let n = t.rows();
    let mut result = ComplexMatrix::identity(n);
    let mut base = t.clone();
    loop {
        if e & 1 == 1 {
            result = &result * &base;
            if !(result.max_abs() <= POWER_OVERFLOW_LIMIT) {
                return None;
            }
        }
        e >>= 1;
        if e == 0 {
            return Some(result);
        }
        base = &base * &base;
        if !(base.max_abs() <= POWER_OVERFLOW_LIMIT) {
            return None;
        }
    }
}

/// Searches for a counterexample to the inequality at exponent `n`.
/// Returns `Ok(None)` when `T^{2n}` overflows the monitoring limit.
pub fn check_exponent(t: &ComplexMatrix, n: usize, budget: SearchBudget, seed: u64) -> Result<Option<ExponentCheck>> {
    let dim = t.require_square()?;
    assert!(n >= 1, "exponent must be positive");
    let Some(a) = checked_power(t, n) else { return Ok(None) };
    let b = &a * &a;
    if !(b.max_abs() <= POWER_OVERFLOW_LIMIT) {
        return Ok(None);
    }

    let scale = 1.0f64.max(a.frobenius_norm()).max(b.frobenius_norm());
    let threshold = -WITNESS_REL_TOL * scale;

    // Dual seeds.
    let ata = &a.adjoint() * &a;
    let q1 = &(&b.adjoint() * &b) - &ata.scale_real(4.0);
    let q2 = &ComplexMatrix::identity(dim) - &ata.scale_real(4.0);
    let mut candidates: Vec<Vec<Complex64>> = Vec::new();
    let dual_eval = |theta: f64, candidates: &mut Vec<Vec<Complex64>>| -> Result<f64> {
        let combo = &q1.scale_real(theta) + &q2.scale_real(1.0 - theta);
        let eig = hermitian_eigen(&combo)?;
        candidates.push(eig.vectors.column(0));
        Ok(eig.values[0])
    };
    let mut dual_bound = dual_eval(0.0, &mut candidates)?.max(dual_eval(1.0, &mut candidates)?);
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut x1 = hi - golden * (hi - lo);
    let mut x2 = lo + golden * (hi - lo);
    let mut f1 = dual_eval(x1, &mut candidates)?;
    let mut f2 = dual_eval(x2, &mut candidates)?;
    for _ in 0..DUAL_SEARCH_STEPS {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + golden * (hi - lo);
            f2 = dual_eval(x2, &mut candidates)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - golden * (hi - lo);
            f1 = dual_eval(x1, &mut candidates)?;
        }
    }
    dual_bound = dual_bound.max(f1).max(f2);

    // Random multistart.
    let mut sampler = Sampler::new(seed ^ (n as u64).wrapping_mul(0xD6E8_FEB8_6659_FD93));
    for _ in 0..budget.starts {
        candidates.push(sampler.unit_vector(dim));
    }

    let mut scored: Vec<(f64, Vec<Complex64>)> = candidates.into_iter().map(|x| (objective(&a, &b, &x), x)).collect();
    scored.sort_by(|p, q| p.0.total_cmp(&q.0));

    let mut best = scored[0].clone();
    for (value, x) in scored.into_iter().take(budget.refined_candidates.max(1)) {
        let refined = refine(&a, &b, x, value, budget.refinement_steps, &mut sampler);
        if refined.0 < best.0 {
            best = refined;
        }
        if best.0 < threshold {
            break;
        }
    }

    Ok(Some(ExponentCheck {
        exponent: n,
        min_margin: best.0,
        falsified: best.0 < threshold,
        best_vector: best.1,
        dual_bound,
    }))
}

/// Random-direction descent on the sphere with an adaptive step.
fn refine(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    mut x: Vec<Complex64>,
    mut value: f64,
    steps: usize,
    sampler: &mut Sampler,
) -> (f64, Vec<Complex64>) {
    let dim = x.len();
    let mut step = 0.3;
    for _ in 0..steps {
        let direction = sampler.gaussian_vector(dim);
        let trial = normalize(x.iter().zip(&direction).map(|(xi, d)| xi + d * step).collect());
        let trial_value = objective(a, b, &trial);
        if trial_value < value {
            x = trial;
            value = trial_value;
            step = (step * 1.5).min(1.0);
        } else {
            step *= 0.8;
            if step < 1e-12 {
                break;
            }
        }
    }
    (value, x)
}

/// Tests exponents `1..=n_max` in order and stops at the first one without a
/// counterexample.
pub fn quasi_hyperbolic_definitional(
    t: &ComplexMatrix,
    n_max: usize,
    budget: SearchBudget,
    seed: u64,
) -> Result<QuasiHyperbolicVerdict> {
    t.require_square()?;
    t.require_finite()?;
    assert!(n_max >= 1, "n_max must be positive");
    let mut diagnostics = Vec::new();
    let mut least_violation: Option<ExponentCheck> = None;

    for n in 1..=n_max {
        let Some(check) = check_exponent(t, n, budget, seed)? else {
            diagnostics.push(format!("exponent {n} and above skipped: power norm exceeds {POWER_OVERFLOW_LIMIT:e}"));
            break;
        };
        if !check.falsified {
            return Ok(QuasiHyperbolicVerdict {
                verdict: true,
                method: VerdictMethod::Definitional,
                exponent: Some(n),
                witness: None,
                margin: check.min_margin,
                witness_exponent: None,
                budget_exhausted: true,
                dual_bound: Some(check.dual_bound),
                diagnostics,
            });
        }
        if least_violation.as_ref().is_none_or(|w| check.min_margin > w.min_margin) {
            least_violation = Some(check);
        }
    }

    match least_violation {
        Some(w) => Ok(QuasiHyperbolicVerdict {
            verdict: false,
            method: VerdictMethod::Definitional,
            exponent: None,
            witness: Some(w.best_vector),
            margin: w.min_margin,
            witness_exponent: Some(w.exponent),
            budget_exhausted: false,
            dual_bound: Some(w.dual_bound),
            diagnostics,
        }),
        None => {
            Err(Error::Overflow(format!("no exponent in 1..={n_max} could be tested below {POWER_OVERFLOW_LIMIT:e}")))
        }
    }
}

/// `max(||T^{2n} x||, ||x||) - 2 ||T^n x||` for an arbitrary nonzero `x`
/// (normalized first).
pub fn inequality_margin(t: &ComplexMatrix, n: usize, x: &[Complex64]) -> f64 {
    let a = linalg::ComplexMatrix::identity(t.rows());
    let a = (0..n).fold(a, |acc, _| &acc * t);
    let b = &a * &a;
    objective(&a, &b, &normalize(x.to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_two_half() -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&[2.0, 0.5])
    }

    #[test]
    fn hand_computed_witness_for_exponent_one() {
        let x = [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        let t = diag_two_half();
        // ||T^2 x|| = sqrt(8.03125), 2||T x|| = 2 sqrt(2.125)
        let expected = 8.03125f64.sqrt() - 2.0 * 2.125f64.sqrt();
        assert!((inequality_margin(&t, 1, &x) - expected).abs() < 1e-14);
        assert!(expected < -0.08);
    }

    /// Dense sampling of the sphere for a diagonal 2x2 matrix: only the
    /// moduli `|x_1|^2 = s`, `|x_2|^2 = 1 - s` matter.
    fn sphere_sampling_minimum(d1: f64, d2: f64, n: i32) -> f64 {
        let f = |s: f64| {
            let b = (d1.powi(4 * n) * s + d2.powi(4 * n) * (1.0 - s)).sqrt();
            let a = (d1.powi(2 * n) * s + d2.powi(2 * n) * (1.0 - s)).sqrt();
            b.max(1.0) - 2.0 * a
        };
        let coarse = 200_000;
        let best = (0..=coarse)
            .min_by(|&i, &j| f(i as f64 / coarse as f64).total_cmp(&f(j as f64 / coarse as f64)))
            .unwrap() as f64
            / coarse as f64;
        let (lo, hi) = ((best - 1.0 / coarse as f64).max(0.0), (best + 1.0 / coarse as f64).min(1.0));
        (0..=100_000).map(|k| f(lo + (hi - lo) * k as f64 / 100_000.0)).fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn diag_two_half_exponents_agree_with_sampling_oracle() {
        let t = diag_two_half();
        let oracle1 = sphere_sampling_minimum(2.0, 0.5, 1);
        let oracle2 = sphere_sampling_minimum(2.0, 0.5, 2);
        assert!(oracle1 < 0.0 && oracle2 > 0.0);

        let c1 = check_exponent(&t, 1, SearchBudget::STANDARD, 5).unwrap().unwrap();
        assert!(c1.falsified);
        assert!(c1.min_margin <= oracle1 + 1e-6);
        assert!((inequality_margin(&t, 1, &c1.best_vector) - c1.min_margin).abs() < 1e-12);

        let c2 = check_exponent(&t, 2, SearchBudget::STANDARD, 5).unwrap().unwrap();
        assert!(!c2.falsified);
        assert!(c2.min_margin >= oracle2 - 1e-8);
        assert!(c2.dual_bound >= 0.0);
    }

    #[test]
    fn definitional_verdict_for_diag_two_half() {
        let v = quasi_hyperbolic_definitional(&diag_two_half(), 5, SearchBudget::STANDARD, 1).unwrap();
        assert!(v.verdict);
        assert_eq!(v.exponent, Some(2));
        assert!(v.budget_exhausted);
        assert!(v.margin >= 0.0);
    }

    #[test]
    fn unitary_is_refuted_at_every_exponent() {
        let rot = ComplexMatrix::from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]]);
        for n in 1..=6 {
            let c = check_exponent(&rot, n, SearchBudget::STANDARD, 2).unwrap().unwrap();
            assert!(c.falsified);
            assert!((c.min_margin + 1.0).abs() < 1e-12);
        }
        let v = quasi_hyperbolic_definitional(&rot, 6, SearchBudget::STANDARD, 2).unwrap();
        assert!(!v.verdict);
        let w = v.witness.unwrap();
        assert!(inequality_margin(&rot, v.witness_exponent.unwrap(), &w) <= v.margin + 1e-12);
        assert!(v.margin < 0.0);
    }

    #[test]
    fn spectral_verdicts() {
        assert!(is_quasi_hyperbolic_spectral(&diag_two_half()).unwrap().verdict);
        let rot = ComplexMatrix::from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]]);
        let v = is_quasi_hyperbolic_spectral(&rot).unwrap();
        assert!(!v.verdict);
        assert!(v.margin < 0.0);
    }

    #[test]
    fn overflowing_powers_are_skipped() {
        let t = ComplexMatrix::from_real_diagonal(&[1e40, 0.5]);
        let v = quasi_hyperbolic_definitional(&t, 4, SearchBudget::STANDARD, 0).unwrap();
        assert!(v.verdict);
        assert_eq!(v.exponent, Some(1));
        assert!(checked_power(&t, 4).is_none());
    }

    #[test]
    fn verdict_serializes_method_and_witness_pairs() {
        let rot = ComplexMatrix::from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]]);
        let v = quasi_hyperbolic_definitional(&rot, 1, SearchBudget::STANDARD, 2).unwrap();
        let json = serde_json::to_value(&v).unwrap();
        assert_eq!(json["method"], "definitional");
        assert_eq!(json["witness"].as_array().unwrap().len(), 2);
        assert_eq!(json["witness"][0].as_array().unwrap().len(), 2);
    }
}
