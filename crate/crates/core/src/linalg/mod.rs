//! Dense complex linear algebra: SVD, Hermitian and general eigenproblems,
//! PSD fractional powers and the polar decomposition.

mod hermitian;
mod matrix;
mod polar;
mod schur;
mod svd;

pub use hermitian::{
    clamp_threshold, hermitian_eigen, hermitian_part, psd_power, require_hermitian, HermitianEigen, HERMITIAN_REL_TOL,
};
pub use matrix::{
    complex_pairs, complex_vectors, opt_complex_pairs, vector_add, vector_norm, vector_sub, ComplexMatrix,
};
pub use polar::{polar_decompose, polar_from_svd, PolarParts};
pub use schur::{eigen_decompose, eigenvalues, schur, EigenDecomposition, SchurForm};
pub use svd::{operator_norm, svd, SvdParts, SVD_KAPPA};

use crate::error::{Error, Result};

/// Numerical rank threshold `n * eps * scale`.
pub fn rank_tolerance(n: usize, scale: f64) -> f64 {
    n as f64 * f64::EPSILON * scale
}

/// Inverse through LU with partial pivoting; `NotInvertible` when the matrix is
/// numerically singular.
pub fn inverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let parts = svd(m)?;
    let tolerance = parts.rank_tolerance();
    if parts.min_singular() <= tolerance {
        return Err(Error::NotInvertible { min_singular: parts.min_singular(), tolerance });
    }
    m.as_dmatrix()
        .clone()
        .try_inverse()
        .map(ComplexMatrix::from_dmatrix)
        .ok_or(Error::NotInvertible { min_singular: parts.min_singular(), tolerance })
}

/// 2-norm condition number `sigma_max / sigma_min` (infinite when singular).
pub fn condition_number(m: &ComplexMatrix) -> Result<f64> {
    let parts = svd(m)?;
    let lo = parts.min_singular();
    Ok(if lo == 0.0 { f64::INFINITY } else { parts.max_singular() / lo })
}
