//! Finite-dimensional laboratory for lambda-Aluthge transforms.
//!
//! The crate computes `Delta_lambda(T) = |T|^lambda U |T|^(1 - lambda)` and its
//! iterates, spectra and quasi-hyperbolicity verdicts, hyperbolic splittings
//! and constructive shadowing of bounded pseudo-orbits, and runs the property
//! suites that check how these objects behave under the transform.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aluthge;
pub mod ensembles;
pub mod error;
pub mod linalg;
pub mod shadowing;
pub mod spectral;
pub mod suites;

pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
