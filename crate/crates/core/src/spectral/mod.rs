//! Spectra, eigenvalue-multiset matching and quasi-hyperbolicity verdicts.
//!
//! In finite dimension the approximate point spectrum, the point spectrum and
//! the spectrum coincide, so a single eigenvalue computation stands for all of
//! them.

mod matching;
mod quasi;
mod report;

pub use matching::{multiset_match, MatchOutcome};
pub use quasi::{
    check_exponent, inequality_margin, is_quasi_hyperbolic_spectral, quasi_hyperbolic_definitional, ExponentCheck,
    QuasiHyperbolicVerdict, SearchBudget, VerdictMethod, POWER_OVERFLOW_LIMIT,
};
pub use report::{hyperbolicity_tolerance, spectrum_report, SpectrumReport, HYPERBOLICITY_REL_TOL};
