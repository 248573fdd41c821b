//! Singular value decomposition by one-sided (Hestenes) Jacobi rotations.
//!
//! Columns of the working copy are orthogonalized pairwise until every pair
//! satisfies `|a_p^H a_q| <= eps * ||a_p|| * ||a_q||`. Column pairs that are
//! already exactly orthogonal are never touched, so structured inputs such as
//! weighted shifts or diagonal matrices decompose without roundoff.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Maximum number of full Jacobi sweeps before `NoConvergence`.
pub const SVD_MAX_SWEEPS: usize = 80;

/// Reconstruction contract: `||W diag(S) V^H - T||_F <= SVD_KAPPA * n * eps * ||T||_F`.
pub const SVD_KAPPA: f64 = 32.0;

/// `T = left * diag(singular_values) * right^H` with singular values nonincreasing.
#[derive(Debug, Clone)]
pub struct SvdParts {
    pub left: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub right: ComplexMatrix,
}

impl SvdParts {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.singular_values.len();
        let scaled = ComplexMatrix::from_fn(n, n, |i, j| self.left.get(i, j) * self.singular_values[j]);
        &scaled * &self.right.adjoint()
    }

    pub fn max_singular(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    pub fn min_singular(&self) -> f64 {
        self.singular_values.last().copied().unwrap_or(0.0)
    }

    /// Numerical rank threshold `n * eps * sigma_max`.
    pub fn rank_tolerance(&self) -> f64 {
        super::rank_tolerance(self.singular_values.len(), self.max_singular())
    }
}

pub fn svd(t: &ComplexMatrix) -> Result<SvdParts> {
    let n = t.require_square()?;
    t.require_finite()?;

    // Power-of-two prescaling keeps squared column norms in range and is exact.
    let peak = t.max_abs();
    if peak == 0.0 {
        return Ok(SvdParts {
            left: ComplexMatrix::identity(n),
            singular_values: vec![0.0; n],
            right: ComplexMatrix::identity(n),
        });
    }
    let scale = 2f64.powi(peak.log2().floor() as i32);

    let mut a: Vec<Vec<Complex64>> = (0..n).map(|j| t.column(j).into_iter().map(|z| z / scale).collect()).collect();
    let mut v: Vec<Vec<Complex64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }).collect())
        .collect();

    let mut converged = false;
    for _ in 0..SVD_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: f64 = a[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = a[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex64 = a[p].iter().zip(&a[q]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let (c, s) = jacobi_rotation(alpha, beta, g);
                let phase = (gamma / g).conj();
                rotate_pair(&mut a, p, q, c, s, phase);
                rotate_pair(&mut v, p, q, c, s, phase);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { routine: "svd", iterations: SVD_MAX_SWEEPS });
    }

    let norms: Vec<f64> = a.iter().map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let mut left_cols: Vec<Option<Vec<Complex64>>> = order
        .iter()
        .map(|&k| if norms[k] > 0.0 { Some(a[k].iter().map(|z| z / norms[k]).collect()) } else { None })
        .collect();
    complete_orthonormal(&mut left_cols, n);

    let left = ComplexMatrix::from_fn(n, n, |i, j| left_cols[j].as_ref().unwrap()[i]);
    let right = ComplexMatrix::from_fn(n, n, |i, j| v[order[j]][i]);
    let singular_values = order.iter().map(|&k| norms[k] * scale).collect();
    Ok(SvdParts { left, singular_values, right })
}

/// Largest singular value.
pub fn operator_norm(t: &ComplexMatrix) -> Result<f64> {
    Ok(svd(t)?.max_singular())
}

/// Real rotation `(c, s)` zeroing the off-diagonal of `[[alpha, g], [g, beta]]`.
pub(crate) fn jacobi_rotation(alpha: f64, beta: f64, g: f64) -> (f64, f64) {
    let zeta = (beta - alpha) / (2.0 * g);
    let t = if zeta == 0.0 { 1.0 } else { zeta.signum() / (zeta.abs() + zeta.hypot(1.0)) };
    let c = 1.0 / t.hypot(1.0);
    (c, c * t)
}

/// Column pair update `q <- q * phase`, then `(p, q) <- (c p - s q, s p + c q)`.
fn rotate_pair(cols: &mut [Vec<Complex64>], p: usize, q: usize, c: f64, s: f64, phase: Complex64) {
    let (head, tail) = cols.split_at_mut(q);
    let cp = &mut head[p];
    let cq = &mut tail[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let yq = *y * phase;
        let xp = *x;
        *x = xp * c - yq * s;
        *y = xp * s + yq * c;
    }
}

/// Fills missing columns with unit vectors orthogonal to the present ones.
fn complete_orthonormal(cols: &mut [Option<Vec<Complex64>>], n: usize) {
    let mut candidate = 0usize;
    for slot in 0..cols.len() {
        if cols[slot].is_some() {
            continue;
        }
        loop {
            assert!(candidate < n, "orthonormal completion ran out of candidates");
            let mut x = vec![Complex64::new(0.0, 0.0); n];
            x[candidate] = Complex64::new(1.0, 0.0);
            candidate += 1;
            // Two passes of Gram-Schmidt.
            for _ in 0..2 {
                for basis in cols.iter().flatten() {
                    let proj: Complex64 = basis.iter().zip(&x).map(|(b, xi)| b.conj() * xi).sum();
                    for (xi, b) in x.iter_mut().zip(basis) {
                        *xi -= proj * b;
                    }
                }
            }
            let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 0.5 {
                cols[slot] = Some(x.into_iter().map(|z| z / norm).collect());
                break;
            }
        }
    }
}
