//! The shadowing pipeline: constants, pseudo-orbits, the glued paths `c(g)`,
//! the shadowing point and its verification.

mod constants;
mod construct;
mod orbit;
mod shadow;

pub use constants::{derive_constants, DeriveOptions, ShadowingConstants};
pub use construct::{
    check_claim, construct_path, straighten, ClaimReport, ClaimWindow, ConstructedPath,
    Straightened,
};
pub use orbit::{
    check_pseudo_orbit, make_pseudo_orbit, representative, CheckOptions, Noise, PseudoOrbit,
    PseudoOrbitCheck, PseudoOrbitFile, PseudoOrbitViolation,
};
pub use shadow::{
    check_consistency, default_depth, edges_in_ball, fit_periodic, shadow, verify_shadowing,
    ConsistencyOptions, ConsistencyReport, EdgeCheck, ShadowOutcome, ShadowSummary, VerifyFailure,
    VerifyReport,
};
