//! Complex Schur form by Householder Hessenberg reduction followed by the
//! single-shift implicit QR algorithm, plus eigenvectors by back-substitution
//! on the triangular factor.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::matrix::{vector_norm, ComplexMatrix};
use crate::error::{Error, Result};

/// Iteration budget per eigenvalue, as in LAPACK's `zlahqr`.
pub const QR_ITERATIONS_PER_EIGENVALUE: usize = 30;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// `T = unitary * triangular * unitary^H`.
#[derive(Debug, Clone)]
pub struct SchurForm {
    pub unitary: ComplexMatrix,
    pub triangular: ComplexMatrix,
}

impl SchurForm {
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        (0..self.triangular.rows()).map(|i| self.triangular.get(i, i)).collect()
    }
}

/// Eigenvalues with unit-norm eigenvectors in matching columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<Complex64>,
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// `||T v_k - lambda_k v_k||` per eigenpair.
    pub fn residuals(&self, t: &ComplexMatrix) -> Vec<f64> {
        self.values
            .iter()
            .enumerate()
            .map(|(k, &lambda)| {
                let v = self.vectors.column(k);
                let tv = t.apply(&v);
                vector_norm(&tv.iter().zip(&v).map(|(a, b)| a - lambda * b).collect::<Vec<_>>())
            })
            .collect()
    }
}

pub fn schur(t: &ComplexMatrix) -> Result<SchurForm> {
    let n = t.require_square()?;
    t.require_finite()?;
    let mut h = t.as_dmatrix().clone();
    let mut q = DMatrix::<Complex64>::identity(n, n);
    reduce_to_hessenberg(&mut h, &mut q);
    hessenberg_qr(&mut h, &mut q)?;
    for j in 0..n {
        for i in (j + 1)..n {
            h[(i, j)] = ZERO;
        }
    }
    Ok(SchurForm { unitary: ComplexMatrix::from_dmatrix(q), triangular: ComplexMatrix::from_dmatrix(h) })
}

/// Eigenvalues with algebraic multiplicity, in Schur-diagonal order.
pub fn eigenvalues(t: &ComplexMatrix) -> Result<Vec<Complex64>> {
    Ok(schur(t)?.eigenvalues())
}

pub fn eigen_decompose(t: &ComplexMatrix) -> Result<EigenDecomposition> {
    let form = schur(t)?;
    let r = form.triangular.as_dmatrix();
    let n = r.nrows();
    let rnorm = r.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let smin = (f64::EPSILON * rnorm).max(f64::MIN_POSITIVE / f64::EPSILON);

    let mut y = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..n {
        let lambda = r[(k, k)];
        y[(k, k)] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut acc = ZERO;
            for j in (i + 1)..=k {
                acc += r[(i, j)] * y[(j, k)];
            }
            let mut denom = r[(i, i)] - lambda;
            if denom.norm() < smin {
                denom = Complex64::new(smin, 0.0);
            }
            y[(i, k)] = -acc / denom;
        }
        // Rescale columns that grow large so later entries stay finite.
        let peak = (0..=k).map(|i| y[(i, k)].norm()).fold(0.0, f64::max);
        if peak > 1e100 {
            for i in 0..=k {
                y[(i, k)] /= peak;
            }
        }
    }
    let mut vectors = form.unitary.as_dmatrix() * y;
    for k in 0..n {
        let norm = vectors.column(k).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Overflow(format!("eigenvector {k} back-substitution")));
        }
        for i in 0..n {
            vectors[(i, k)] /= norm;
        }
    }
    Ok(EigenDecomposition { values: form.eigenvalues(), vectors: ComplexMatrix::from_dmatrix(vectors) })
}

fn reduce_to_hessenberg(h: &mut DMatrix<Complex64>, q: &mut DMatrix<Complex64>) {
    let n = h.nrows();
    if n < 3 {
        return;
    }
    for k in 0..(n - 2) {
        let x: Vec<Complex64> = ((k + 1)..n).map(|i| h[(i, k)]).collect();
        let tail: f64 = x[1..].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if tail == 0.0 {
            continue;
        }
        let xnorm = vector_norm(&x);
        let phase = if x[0].norm() == 0.0 { Complex64::new(1.0, 0.0) } else { x[0] / x[0].norm() };
        // u = x + phase * ||x|| e1; reflector I - 2 u u^H / (u^H u).
        let mut u = x;
        u[0] += phase * xnorm;
        let unorm2: f64 = u.iter().map(|z| z.norm_sqr()).sum();
        let beta = 2.0 / unorm2;

        // Left: rows k+1.. of h.
        for j in 0..n {
            let dot: Complex64 = u.iter().enumerate().map(|(r, ur)| ur.conj() * h[(k + 1 + r, j)]).sum();
            let f = dot * beta;
            for (r, ur) in u.iter().enumerate() {
                h[(k + 1 + r, j)] -= ur * f;
            }
        }
        // Right: columns k+1.. of h and q.
        for target in [&mut *h, &mut *q] {
            for i in 0..n {
                let dot: Complex64 = u.iter().enumerate().map(|(c, uc)| target[(i, k + 1 + c)] * uc).sum();
                let f = dot * beta;
                for (c, uc) in u.iter().enumerate() {
                    target[(i, k + 1 + c)] -= f * uc.conj();
                }
            }
        }
        for i in (k + 2)..n {
            h[(i, k)] = ZERO;
        }
    }
}

/// Unitary `G = [[c, s], [-conj(s), c]]` with `G [x; y] = [r; 0]`.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    if y == ZERO {
        return (1.0, ZERO);
    }
    if x == ZERO {
        return (0.0, y.conj() / y.norm());
    }
    let ax = x.norm();
    let h = ax.hypot(y.norm());
    (ax / h, (x / ax) * y.conj() / h)
}

fn hessenberg_qr(h: &mut DMatrix<Complex64>, q: &mut DMatrix<Complex64>) -> Result<()> {
    let n = h.nrows();
    if n == 0 {
        return Ok(());
    }
    let budget = QR_ITERATIONS_PER_EIGENVALUE * n.max(10) * n;
    let small = f64::MIN_POSITIVE * (n as f64 / f64::EPSILON);
    let mut total = 0usize;
    let mut its = 0usize;
    let mut hi = n - 1;

    while hi > 0 {
        // Locate the start of the active unreduced block.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut tst = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if tst == 0.0 {
                if lo >= 2 {
                    tst += h[(lo - 1, lo - 2)].re.abs();
                }
                if lo < hi {
                    tst += h[(lo + 1, lo)].re.abs();
                }
            }
            if sub <= small || sub <= f64::EPSILON * tst {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            its = 0;
            continue;
        }

        total += 1;
        its += 1;
        if total > budget {
            return Err(Error::NoConvergence { routine: "schur", iterations: budget });
        }

        let shift = if its.is_multiple_of(10) {
            h[(hi, hi)] + 0.75 * h[(hi, hi - 1)].re.abs()
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        for k in lo..hi {
            let (x, y) =
                if k == lo { (h[(lo, lo)] - shift, h[(lo + 1, lo)]) } else { (h[(k, k - 1)], h[(k + 1, k - 1)]) };
            let (c, s) = givens(x, y);
            let first_col = if k == lo { lo } else { k - 1 };
            for j in first_col..n {
                let a = h[(k, j)];
                let b = h[(k + 1, j)];
                h[(k, j)] = a * c + s * b;
                h[(k + 1, j)] = -s.conj() * a + b * c;
            }
            if k > lo {
                h[(k + 1, k - 1)] = ZERO;
            }
            let last_row = (k + 2).min(hi);
            for i in 0..=last_row {
                let a = h[(i, k)];
                let b = h[(i, k + 1)];
                h[(i, k)] = a * c + s.conj() * b;
                h[(i, k + 1)] = -s * a + b * c;
            }
            for i in 0..n {
                let a = q[(i, k)];
                let b = q[(i, k + 1)];
                q[(i, k)] = a * c + s.conj() * b;
                q[(i, k + 1)] = -s * a + b * c;
            }
        }
    }
    Ok(())
}

/// Eigenvalue of `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let bc = b * c;
    if bc == ZERO {
        return d;
    }
    let p = (a - d) * 0.5;
    let disc = (p * p + bc).sqrt();
    let plus = p + disc;
    let minus = p - disc;
    let denom = if plus.norm() >= minus.norm() { plus } else { minus };
    if denom == ZERO {
        d
    } else {
        d - bc / denom
    }
}
