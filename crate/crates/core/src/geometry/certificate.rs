//! The certificate bundle written by `bshadow certify` and read back by the
//! shadowing pipeline.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    certify_delta, certify_morse, divergence_constants, DivergenceConstants,
    HyperbolicityCertificate, MorseConstant, QuasiGeodesicParams,
};
use crate::error::Result;
use crate::group::GroupContext;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Cap on DFS nodes (and on scanned ray pairs) per search.
    pub node_budget: u64,
    /// Cap on geodesics enumerated between two points.
    pub geodesic_cap: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            node_budget: 20_000_000,
            geodesic_cap: 256,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeometryCertificate {
    pub delta: u32,
    pub radius: u32,
    pub hyperbolicity: HyperbolicityCertificate,
    pub morse: MorseConstant,
    pub divergence: Option<DivergenceConstants>,
    /// `delta` at every radius up to `radius`; a non-constant tail hints that
    /// the group is not hyperbolic at this scale.
    pub delta_by_radius: Vec<u32>,
    pub search_budget: SearchBudget,
}

impl GeometryCertificate {
    /// False when some search was cut short by a cap.
    pub fn is_complete(&self) -> bool {
        self.hyperbolicity.exact
            && self.morse.exact
            && self.divergence.as_ref().is_none_or(|d| d.exact)
    }

    /// True when `delta` did not grow between the last two radii.
    pub fn delta_stabilized(&self) -> bool {
        match self.delta_by_radius.as_slice() {
            [.., a, b] => a == b,
            _ => false,
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

/// Thin triangles at every radius up to `radius`, the geodesic Morse constant,
/// and divergence constants for geodesic rays with `D = 1` and the given `C`.
pub fn certify_group(
    ctx: &GroupContext,
    radius: u32,
    divergence_c: Option<u32>,
    divergence_radius: u32,
    budget: SearchBudget,
) -> Result<GeometryCertificate> {
    let mut delta_by_radius = Vec::new();
    for r in 1..radius {
        delta_by_radius.push(certify_delta(ctx, r, budget.geodesic_cap)?.delta);
    }
    let hyperbolicity = certify_delta(ctx, radius, budget.geodesic_cap)?;
    delta_by_radius.push(hyperbolicity.delta);
    let geodesic = QuasiGeodesicParams::geodesic();
    let morse = certify_morse(
        &geodesic,
        ctx,
        radius,
        budget.node_budget,
        budget.geodesic_cap,
    )?;
    let divergence = match divergence_c {
        Some(c) => Some(divergence_constants(
            1,
            c,
            &geodesic,
            &hyperbolicity,
            &morse,
            ctx,
            divergence_radius,
            budget.node_budget,
        )?),
        None => None,
    };
    Ok(GeometryCertificate {
        delta: hyperbolicity.delta,
        radius,
        hyperbolicity,
        morse,
        divergence,
        delta_by_radius,
        search_budget: budget,
    })
}
