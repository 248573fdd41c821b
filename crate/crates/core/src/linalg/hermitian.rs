//! Hermitian eigendecomposition (cyclic two-sided Jacobi) and PSD powers.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::svd::jacobi_rotation;
use crate::error::{Error, Result};

pub const JACOBI_MAX_SWEEPS: usize = 80;

/// Relative asymmetry `||P - P^H||_F / ||P||_F` accepted as Hermitian.
pub const HERMITIAN_REL_TOL: f64 = 1e-10;

/// `A = vectors * diag(values) * vectors^H`, values ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// `vectors * diag(f(values)) * vectors^H`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let scaled = ComplexMatrix::from_fn(n, n, |i, j| self.vectors.get(i, j) * f(self.values[j]));
        hermitian_part(&(&scaled * &self.vectors.adjoint()))
    }
}

/// `(A + A^H) / 2`.
pub fn hermitian_part(a: &ComplexMatrix) -> ComplexMatrix {
    (a + &a.adjoint()).scale_real(0.5)
}

pub fn require_hermitian(a: &ComplexMatrix) -> Result<()> {
    a.require_square()?;
    a.require_finite()?;
    let asymmetry = (a - &a.adjoint()).frobenius_norm();
    let tolerance = HERMITIAN_REL_TOL * a.frobenius_norm();
    if asymmetry > tolerance {
        return Err(Error::NotHermitian { asymmetry, tolerance });
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix; only the Hermitian part is used.
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<HermitianEigen> {
    let n = a.require_square()?;
    a.require_finite()?;
    let mut m = hermitian_part(a).into_dmatrix();
    for i in 0..n {
        m[(i, i)].im = 0.0;
    }
    let mut v = nalgebra::DMatrix::<Complex64>::identity(n, n);

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let b = m[(p, q)];
                let g = b.norm();
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                if g == 0.0 || g <= f64::EPSILON * (app.abs() * aqq.abs()).sqrt() {
                    continue;
                }
                rotated = true;
                let (c, s) = jacobi_rotation(app, aqq, g);
                let phase = (b / g).conj();
                // Columns: q *= phase, then real rotation.
                for i in 0..n {
                    let xp = m[(i, p)];
                    let xq = m[(i, q)] * phase;
                    m[(i, p)] = xp * c - xq * s;
                    m[(i, q)] = xp * s + xq * c;
                    let vp = v[(i, p)];
                    let vq = v[(i, q)] * phase;
                    v[(i, p)] = vp * c - vq * s;
                    v[(i, q)] = vp * s + vq * c;
                }
                // Rows: q *= conj(phase), then transposed rotation.
                let back = phase.conj();
                for j in 0..n {
                    let yp = m[(p, j)];
                    let yq = m[(q, j)] * back;
                    m[(p, j)] = yp * c - yq * s;
                    m[(q, j)] = yp * s + yq * c;
                }
                m[(p, q)] = Complex64::new(0.0, 0.0);
                m[(q, p)] = Complex64::new(0.0, 0.0);
                m[(p, p)].im = 0.0;
                m[(q, q)].im = 0.0;
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { routine: "hermitian_eigen", iterations: JACOBI_MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    Ok(HermitianEigen {
        values: order.iter().map(|&k| m[(k, k)].re).collect(),
        vectors: ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]),
    })
}

/// Eigenvalues in `[-tau, 0]`, `tau = n * eps * ||P||`, are treated as zero.
pub fn clamp_threshold(eigen: &HermitianEigen) -> f64 {
    let norm = eigen.values.iter().map(|x| x.abs()).fold(0.0, f64::max);
    super::rank_tolerance(eigen.values.len(), norm)
}

/// `P^t` for Hermitian positive semidefinite `P` and `t` in `[0, 1]`.
///
/// `t = 0` returns the identity, not the projection onto the range of `P`.
pub fn psd_power(p: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    assert!((0.0..=1.0).contains(&t), "psd_power exponent {t} outside [0, 1]");
    require_hermitian(p)?;
    let n = p.rows();
    if t == 0.0 {
        return Ok(ComplexMatrix::identity(n));
    }
    let eigen = hermitian_eigen(p)?;
    let tau = clamp_threshold(&eigen);
    if let Some(&worst) = eigen.values.first() {
        if worst < -tau {
            return Err(Error::NegativeSpectrum { eigenvalue: worst, threshold: tau });
        }
    }
    Ok(eigen.map_spectrum(|mu| if mu <= 0.0 { 0.0 } else { mu.powf(t) }))
}
