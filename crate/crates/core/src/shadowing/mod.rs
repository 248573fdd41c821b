//! Hyperbolic splittings, bounded pseudo-orbits and their constructive
//! shadowing, directly and through the `|T|^lambda` conjugacy.

mod orbit;
mod shadow;
mod splitting;
mod transfer;

pub use orbit::{
    generate_noisy_orbit, generate_pseudo_orbit, noisy_orbit_with_noise, orbit_defects, OrbitMode, PseudoOrbit,
};
pub use shadow::{shadow_orbit, true_orbit_tolerance, verify_shadowing, ShadowResult, TRUE_ORBIT_REL_TOL};
pub use splitting::{hyperbolic_splitting, HyperbolicSplitting, EIGENBASIS_CONDITION_MAX, POWER_HORIZON};
pub use transfer::{shadow_through_conjugacy, transfer_shadowing, transfer_shadowing_back, TransferDirection};
