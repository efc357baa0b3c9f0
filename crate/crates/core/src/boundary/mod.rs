//! The Gromov boundary through directed systems of geodesics.

mod cover;
mod dsg;
mod point;

pub use cover::{
    cover_for_l, lebesgue_l, point_through, reduced_words, sample_points, Cover, CoverElement,
    CoverElementFile, CoverElements, CoverFile, CoverKind, MAX_LISTED,
};
pub use dsg::{
    check_dsg_axioms, dsg_from_ray, neighborhood_contains, point_neighborhood_contains,
    ray_from_dsg, shift, translated_membership, Dsg, DsgAxiomReport, DsgFromRay,
};
pub use point::{act, BoundaryPoint, BoundaryPointFile};
