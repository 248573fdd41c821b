//! Polar decomposition `T = U |T|` through the SVD.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::svd::{svd, SvdParts};
use crate::error::Result;

/// `T = isometry_part * modulus` with `modulus = (T^H T)^{1/2}` and
/// `ker(isometry_part) = ker(modulus)` up to the rank tolerance.
#[derive(Debug, Clone)]
pub struct PolarParts {
    pub isometry_part: ComplexMatrix,
    pub modulus: ComplexMatrix,
}

pub fn polar_decompose(t: &ComplexMatrix) -> Result<PolarParts> {
    Ok(polar_from_svd(&svd(t)?))
}

/// `U = sum w_i v_i^H` over singular values above the rank tolerance,
/// `P = V diag(S) V^H`.
pub fn polar_from_svd(parts: &SvdParts) -> PolarParts {
    let n = parts.singular_values.len();
    let tol = parts.rank_tolerance();
    let keep: Vec<bool> = parts.singular_values.iter().map(|&s| s > tol).collect();

    let masked_left =
        ComplexMatrix::from_fn(n, n, |i, j| if keep[j] { parts.left.get(i, j) } else { Complex64::new(0.0, 0.0) });
    let v_adj = parts.right.adjoint();
    let isometry_part = &masked_left * &v_adj;

    let scaled_right = ComplexMatrix::from_fn(n, n, |i, j| parts.right.get(i, j) * parts.singular_values[j]);
    let modulus = super::hermitian::hermitian_part(&(&scaled_right * &v_adj));
    PolarParts { isometry_part, modulus }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn antidiagonal_example() {
        let t = ComplexMatrix::from_real_rows(&[&[0.0, 4.0], &[1.0, 0.0]]);
        let p = polar_decompose(&t).unwrap();
        assert!(
            (&p.isometry_part - &ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])).frobenius_norm() < 1e-15
        );
        assert!((&p.modulus - &ComplexMatrix::from_real_diagonal(&[1.0, 4.0])).frobenius_norm() < 1e-15);
        // Oracle: U P = T and P^2 = T^H T.
        assert!((&(&p.isometry_part * &p.modulus) - &t).frobenius_norm() < 1e-14);
        assert!((&(&p.modulus * &p.modulus) - &(&t.adjoint() * &t)).frobenius_norm() < 1e-13);
    }

    #[test]
    fn identity_example() {
        let p = polar_decompose(&ComplexMatrix::identity(3)).unwrap();
        assert_eq!(p.isometry_part, ComplexMatrix::identity(3));
        assert_eq!(p.modulus, ComplexMatrix::identity(3));
    }

    #[test]
    fn singular_input_zeroes_isometry_on_kernel() {
        let t = ComplexMatrix::from_real_diagonal(&[0.0, 3.0]);
        let p = polar_decompose(&t).unwrap();
        assert_eq!(p.isometry_part, ComplexMatrix::from_real_diagonal(&[0.0, 1.0]));
        assert_eq!(p.modulus, ComplexMatrix::from_real_diagonal(&[0.0, 3.0]));
    }
}
