//! The chain of constants `l -> (k, lambda, epsilon) -> K -> J -> (Delta_1,
//! Delta_2) -> L`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    certify_morse, divergence_constants, local_to_global, HyperbolicityCertificate, Lambda,
    QuasiGeodesicParams,
};
use crate::group::GroupContext;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeriveOptions {
    /// Ball on which `k`-local paths are enumerated.
    pub local_radius: u32,
    pub morse_radius: u32,
    /// `None`: free groups use `2C + 2 Delta_1 + 8`, other groups the local
    /// radius.
    pub divergence_radius: Option<u32>,
    /// Largest window tried before giving up on stabilisation.
    pub max_k: Option<u32>,
    pub node_budget: u64,
    pub geodesic_cap: usize,
}

impl DeriveOptions {
    pub fn for_group(ctx: &GroupContext, cert: &HyperbolicityCertificate) -> Self {
        let r = if ctx.is_free() {
            4
        } else {
            cert.radius_certified
        };
        Self {
            local_radius: r,
            morse_radius: r,
            divergence_radius: None,
            max_k: None,
            node_budget: 20_000_000,
            geodesic_cap: 256,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShadowingConstants {
    pub l: u32,
    pub delta: u32,
    pub k: u32,
    pub lambda: Lambda,
    pub epsilon: u32,
    #[serde(rename = "K")]
    pub big_k: u32,
    #[serde(rename = "J")]
    pub j: u32,
    #[serde(rename = "C")]
    pub c: u32,
    pub delta1: u32,
    pub delta2: u32,
    #[serde(rename = "L")]
    pub big_l: u32,
    pub f_radius: u32,
    pub delta_radius: u32,
    pub local_radius: u32,
    pub morse_radius: u32,
    pub divergence_radius: u32,
    /// `epsilon'` for every window tried; the last two agree.
    pub epsilon_by_k: Vec<(u32, u32)>,
    pub divergence_vacuous: bool,
    /// False when some search hit its budget.
    pub exact: bool,
}

impl ShadowingConstants {
    /// `J = max{k + 1, K + 2 delta + l + 1}`.
    pub fn j_formula(k: u32, big_k: u32, delta: u32, l: u32) -> u32 {
        (k + 1).max(big_k + 2 * delta + l + 1)
    }

    /// `L = max{Delta_1 + 2 + 2J, J + 1 + Delta_2}`.
    pub fn l_formula(delta1: u32, delta2: u32, j: u32) -> u32 {
        (delta1 + 2 + 2 * j).max(j + 1 + delta2)
    }

    pub fn local_params(&self) -> QuasiGeodesicParams {
        QuasiGeodesicParams::global(1, 2 * self.delta).with_window(self.k)
    }

    pub fn global_params(&self) -> QuasiGeodesicParams {
        QuasiGeodesicParams {
            lambda: self.lambda,
            epsilon: self.epsilon,
            k: None,
        }
    }

    /// Both formulas hold exactly.
    pub fn check_formulas(&self) -> bool {
        self.j == Self::j_formula(self.k, self.big_k, self.delta, self.l)
            && self.c == 2 * self.j + 1
            && self.big_l == Self::l_formula(self.delta1, self.delta2, self.j)
            && self.f_radius == self.big_l
    }
}

/// Runs the chain for a Lebesgue level `l`.
///
/// `k` is the least window above `8 delta` whose discovered `epsilon'` does
/// not change when the window grows by one.
pub fn derive_constants(
    l: u32,
    cert: &HyperbolicityCertificate,
    ctx: &GroupContext,
    opts: &DeriveOptions,
) -> Result<ShadowingConstants> {
    let delta = cert.delta;
    if l <= 8 * delta {
        return Err(Error::Precondition(format!(
            "l = {l} must exceed 8 delta = {}",
            8 * delta
        )));
    }
    let max_k = opts.max_k.unwrap_or(8 * delta + 16);
    let base = QuasiGeodesicParams::global(1, 2 * delta);
    let mut exact = cert.exact;
    let mut epsilon_by_k = Vec::new();
    let mut eps_at = |k: u32| -> Result<u32> {
        let r = local_to_global(
            &base.with_window(k),
            cert,
            ctx,
            opts.local_radius,
            opts.node_budget,
        )?;
        exact &= r.exact;
        epsilon_by_k.push((k, r.global.epsilon));
        Ok(r.global.epsilon)
    };
    let mut k = 8 * delta + 1;
    let mut prev = eps_at(k)?;
    loop {
        if k >= max_k {
            return Err(Error::InsufficientRadius {
                radius: opts.local_radius,
                detail: format!("epsilon' did not stabilise for windows up to {max_k}"),
            });
        }
        let next = eps_at(k + 1)?;
        if next == prev {
            break;
        }
        k += 1;
        prev = next;
    }
    let global = QuasiGeodesicParams::global(1, prev);
    let morse = certify_morse(
        &global,
        ctx,
        opts.morse_radius,
        opts.node_budget,
        opts.geodesic_cap,
    )?;
    exact &= morse.exact;
    let j = ShadowingConstants::j_formula(k, morse.k, delta, l);
    let c = 2 * j + 1;
    let delta1 = 2 * morse.k + 1 + 4 * delta;
    let divergence_radius = opts.divergence_radius.unwrap_or(if ctx.is_free() {
        2 * c + 2 * delta1 + 8
    } else {
        opts.local_radius
    });
    let div = divergence_constants(
        1,
        c,
        &global,
        cert,
        &morse,
        ctx,
        divergence_radius,
        opts.node_budget,
    )?;
    exact &= div.exact;
    let big_l = ShadowingConstants::l_formula(div.delta1, div.delta2, j);
    Ok(ShadowingConstants {
        l,
        delta,
        k,
        lambda: global.lambda,
        epsilon: global.epsilon,
        big_k: morse.k,
        j,
        c,
        delta1: div.delta1,
        delta2: div.delta2,
        big_l,
        f_radius: big_l,
        delta_radius: cert.radius_certified,
        local_radius: opts.local_radius,
        morse_radius: opts.morse_radius,
        divergence_radius,
        epsilon_by_k,
        divergence_vacuous: div.vacuous,
        exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::certify_delta;

    #[test]
    fn formulas_pick_the_right_arm() {
        assert_eq!(ShadowingConstants::j_formula(2, 0, 0, 5), 6);
        assert_eq!(ShadowingConstants::j_formula(30, 0, 0, 5), 31);
        assert_eq!(ShadowingConstants::l_formula(1, 13, 6), 20);
        assert_eq!(ShadowingConstants::l_formula(9, 0, 6), 23);
    }

    #[test]
    fn free_group_chain() {
        let g = GroupContext::free(2);
        let cert = certify_delta(&g, 4, 64).unwrap();
        let c = derive_constants(5, &cert, &g, &DeriveOptions::for_group(&g, &cert)).unwrap();
        // in a tree a 2-local geodesic is a geodesic, a 1-local one may backtrack
        assert_eq!((c.k, c.epsilon, c.big_k), (2, 0, 0));
        assert_eq!((c.j, c.c, c.delta1), (6, 13, 1));
        assert!(c.check_formulas());
        assert!(c.epsilon_by_k[0].1 > 0);
    }

    #[test]
    fn level_must_exceed_eight_delta() {
        let g = GroupContext::free(2);
        let mut cert = certify_delta(&g, 2, 64).unwrap();
        cert.delta = 1;
        assert!(matches!(
            derive_constants(8, &cert, &g, &DeriveOptions::for_group(&g, &cert)),
            Err(Error::Precondition(_))
        ));
    }
}
