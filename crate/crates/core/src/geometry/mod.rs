//! Hyperbolic geometry on certified balls: thin triangles, quasi-geodesics,
//! Morse constants, closeness of geodesics and gluing.

mod certificate;
mod delta;
mod divergence;
mod paths;
mod quasi;
mod space;

pub use certificate::{certify_group, GeometryCertificate, SearchBudget};
pub(crate) use delta::descend_paths;
pub use delta::{certify_delta, HyperbolicityCertificate};
pub use divergence::{
    check_trichotomy, classify_pair, divergence_constants, divergence_profile, DivergenceConstants,
    Trichotomy, TrichotomyReport,
};
pub use paths::{
    check_closeness, distance_to_image, fellow_travel_upgrade, glue, hausdorff_distance,
    is_edge_path, is_geodesic, ClosenessReport,
};
pub use quasi::{
    certify_morse, is_quasi_geodesic, local_to_global, Lambda, LocalToGlobal, MorseConstant,
    QuasiGeodesicCheck, QuasiGeodesicParams,
};
pub use space::BallSpace;
