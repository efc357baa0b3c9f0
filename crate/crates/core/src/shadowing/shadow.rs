//! The shadowing point `x = Q(m(1_G))`, its verification against a cover, and
//! the consistency of the systems `m(g)` along edges.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::construct::{check_claim, construct_path, straighten, ClaimReport, ConstructedPath};
use super::orbit::random_element;
use super::{PseudoOrbit, ShadowingConstants};
use crate::boundary::{
    act, dsg_from_ray, neighborhood_contains, ray_from_dsg, BoundaryPoint, Cover, CoverElement, Dsg,
};
use crate::error::{Error, Result};
use crate::geometry::{distance_to_image, HyperbolicityCertificate};
use crate::group::{Gen, GroupContext, GroupElement, Segment};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShadowOutcome {
    /// The shadowing point, known along the straightened ray.
    pub x: BoundaryPoint,
    /// Shortest eventually periodic word matching `x` on its known letters.
    pub x_fit: Option<BoundaryPoint>,
    pub path: ConstructedPath,
    pub claim: ClaimReport,
    pub ray_survivors: u64,
    /// `max_t d(r(1)(t), Img c(1))`, at most `K`.
    pub ray_distance: u32,
    /// `max d(c_{m_1}(t), c_{m(1)}(t))` for `t <= J - K - 2 delta`.
    pub proximity: u32,
    pub proximity_window: u32,
    /// `m(1) in N_{m_1}^{l, 2 delta}`.
    pub in_neighborhood: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShadowSummary {
    pub x: String,
    pub x_prefix: String,
    pub x_depth: usize,
    pub x_fit: Option<String>,
    pub path_depth: usize,
    pub blocks: usize,
    pub support_exhausted: Option<String>,
    pub claim: ClaimReport,
    pub ray_survivors: u64,
    pub ray_distance: u32,
    pub proximity: u32,
    pub proximity_window: u32,
    pub in_neighborhood: bool,
    /// Filled in by callers that know a reference ray.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub profile: Vec<u32>,
}

impl ShadowOutcome {
    pub fn summary(&self, ctx: &GroupContext) -> ShadowSummary {
        let alpha = ctx.alphabet();
        let last = match &self.x {
            BoundaryPoint::Truncated { ray } => {
                ray.last().map(|g| ctx.format(g)).unwrap_or_default()
            }
            p => p.format(alpha),
        };
        ShadowSummary {
            x: self
                .x_fit
                .as_ref()
                .map_or_else(|| self.x.format(alpha), |p| p.format(alpha)),
            x_prefix: last,
            x_depth: self.x.depth().unwrap_or(0),
            x_fit: self.x_fit.as_ref().map(|p| p.format(alpha)),
            path_depth: self.path.depth(),
            blocks: self.path.breakpoints.len() + 1,
            support_exhausted: self.path.support_exhausted.clone(),
            claim: self.claim.clone(),
            ray_survivors: self.ray_survivors,
            ray_distance: self.ray_distance,
            proximity: self.proximity,
            proximity_window: self.proximity_window,
            in_neighborhood: self.in_neighborhood,
            profile: Vec::new(),
        }
    }
}

/// Shortest `p q^oo` (by `|p| + |q|`) agreeing with `w` on all of `w`, with
/// at least two full periods observed after `p`.
pub fn fit_periodic(ctx: &GroupContext, w: &[Gen]) -> Option<BoundaryPoint> {
    let n = w.len();
    for total in 1..=n {
        for q in 1..=total {
            let p = total - q;
            if n < p + 2 * q {
                continue;
            }
            if (p + q..n).all(|i| w[i] == w[i - q]) {
                return BoundaryPoint::periodic(ctx.alphabet(), &w[..p], &w[p..p + q]).ok();
            }
        }
    }
    None
}

/// Default construction depth: what the support allows after reserving the
/// `F` radius and the check radius.
pub fn default_depth(po: &PseudoOrbit, constants: &ShadowingConstants, check_radius: u32) -> usize {
    po.support_radius
        .saturating_sub(constants.f_radius + check_radius) as usize
}

/// `c(g)` through the Claim and the straightening, as a ray segment.
fn straightened_ray(
    g: &GroupElement,
    po: &PseudoOrbit,
    constants: &ShadowingConstants,
    depth: usize,
    ctx: &GroupContext,
) -> Result<(ConstructedPath, ClaimReport, super::construct::Straightened)> {
    let path = construct_path(g, po, constants, depth, ctx)?;
    if path.depth() < 2 * constants.j as usize {
        return Err(Error::SupportExhausted(
            path.support_exhausted
                .clone()
                .unwrap_or_else(|| format!("depth {depth} is below 2J = {}", 2 * constants.j)),
        ));
    }
    let claim = check_claim(&path, constants, ctx)?;
    if !claim.ok {
        let w = claim.failures.first();
        return Err(Error::ClaimViolated(format!(
            "c({}) fails the local check{}",
            ctx.format(g),
            w.map_or(String::from(" on the whole path"), |w| format!(
                " on [{}, {}] with window {} at {:?}",
                w.from, w.to, w.window, w.violation
            ))
        )));
    }
    let st = straighten(&path, constants, ctx)?;
    Ok((path, claim, st))
}

/// `x := Q(m(1_G))`.
pub fn shadow(
    po: &PseudoOrbit,
    constants: &ShadowingConstants,
    ctx: &GroupContext,
    cert: &HyperbolicityCertificate,
    depth: usize,
) -> Result<ShadowOutcome> {
    let one = GroupElement::identity();
    let (path, claim, st) = straightened_ray(&one, po, constants, depth, ctx)?;
    let ray = Segment::new(1, st.ray.clone());
    let x = BoundaryPoint::truncated(st.ray.clone(), ctx)?;
    let support = if ctx.is_free() {
        (ray.values.len() as u32).saturating_sub(2)
    } else {
        (ray.values.len() as u32).saturating_sub(2) / 2
    };
    let m1 = dsg_from_ray(&ray, support, ctx)?.dsg;
    let mg = po.rep(&one, ctx)?;
    let window = constants
        .j
        .saturating_sub(constants.big_k + 2 * constants.delta);
    let a = ray_from_dsg(&mg, &one, window as usize, ctx)?;
    let b = ray_from_dsg(&m1, &one, window as usize, ctx)?;
    let mut proximity = 0;
    for (u, v) in a.values.iter().zip(&b.values) {
        proximity = proximity.max(ctx.word_metric(u, v)?);
    }
    let in_neighborhood = neighborhood_contains(&m1, &mg, constants.l, 2 * cert.delta, ctx, cert)?;
    let x_fit = if ctx.is_free() {
        fit_periodic(ctx, st.ray.last().expect("non-empty").word())
    } else {
        None
    };
    Ok(ShadowOutcome {
        x,
        x_fit,
        path,
        claim,
        ray_survivors: st.survivors,
        ray_distance: st.max_distance,
        proximity,
        proximity_window: window,
        in_neighborhood,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyFailure {
    pub g: String,
    pub gx: String,
    pub x_g: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub ok: bool,
    pub check_radius: u32,
    pub checked: u64,
    pub passed: u64,
    pub failures: Vec<VerifyFailure>,
    /// `g -> ` the cover element holding `g x` and `x_g`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<BTreeMap<String, String>>,
}

fn describe(e: &CoverElement, ctx: &GroupContext) -> String {
    if ctx.is_free() {
        if let Ok(w) = e.center.prefix_word(e.l.saturating_sub(1) as usize) {
            return format!("N^{}({}…)", e.l, ctx.alphabet().format(&w));
        }
    }
    format!("N^{}({})", e.l, e.center.format(ctx.alphabet()))
}

/// For every `g` in `B(check_radius)`, an element of the cover holding both
/// `g x` and `x_g`.
pub fn verify_shadowing(
    po: &PseudoOrbit,
    x: &BoundaryPoint,
    u_cover: &Cover,
    check_radius: u32,
    ctx: &GroupContext,
    cert: &HyperbolicityCertificate,
    keep_witnesses: bool,
) -> Result<VerifyReport> {
    if check_radius > po.support_radius {
        return Err(Error::Precondition(format!(
            "check radius {check_radius} exceeds the support radius {}",
            po.support_radius
        )));
    }
    let ball = ctx.ball(check_radius)?;
    let results = ball
        .par_iter()
        .map(
            |g| -> Result<(String, std::result::Result<String, VerifyFailure>)> {
                let gx = act(g, x, ctx)?;
                let xg = po.point(g, ctx)?;
                let name = ctx.format(g);
                Ok(match u_cover.find_common(&[&gx, &xg], ctx, cert)? {
                    Some(e) => (name, Ok(describe(&e, ctx))),
                    None => (
                        name.clone(),
                        Err(VerifyFailure {
                            g: name,
                            gx: gx.format(ctx.alphabet()),
                            x_g: xg.format(ctx.alphabet()),
                        }),
                    ),
                })
            },
        )
        .collect::<Result<Vec<_>>>()?;
    let mut rep = VerifyReport {
        ok: true,
        check_radius,
        checked: 0,
        passed: 0,
        failures: Vec::new(),
        witnesses: keep_witnesses.then(BTreeMap::new),
    };
    for (name, r) in results {
        rep.checked += 1;
        match r {
            Ok(w) => {
                rep.passed += 1;
                if let Some(m) = rep.witnesses.as_mut() {
                    m.insert(name, w);
                }
            }
            Err(f) => {
                rep.ok = false;
                if rep.failures.len() < 32 {
                    rep.failures.push(f);
                }
            }
        }
    }
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeCheck {
    pub g: String,
    pub h: String,
    /// `Delta_1` for rays starting `d(1, g h^-1)` apart.
    pub threshold: u32,
    /// Points `c(g)(t)` compared, `t <= window`.
    pub window: u32,
    /// `max_t d(c(g)(t), Img(g h^-1 c(h)))`.
    pub path_distance: u32,
    /// The same for the straightened rays.
    pub ray_distance: u32,
    /// `d(c(g)(t), Img(g h^-1 c(h)))` for `t = 1, ..., window`.
    pub profile: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub ok: bool,
    /// `Delta_1` for start points at distance 1; edges away from the identity
    /// carry their own.
    pub threshold: u32,
    pub edges: Vec<EdgeCheck>,
    pub edge_violations: u64,
    pub first_lemma_checks: u64,
    pub first_lemma_violations: u64,
    /// Largest `d(h c_{m_{h^-1}}(t), g c_{m_{g^-1}}(t)) - d(h, g)`.
    pub first_lemma_max_excess: i64,
    pub second_lemma_checks: u64,
    pub second_lemma_violations: u64,
    pub second_lemma_max: u32,
    /// The second bound read with `g c(t + i)` in place of `g c(t + i - 1)`.
    pub unshifted_second_lemma_violations: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsistencyOptions {
    pub depth: usize,
    /// Random pairs `(g, h)` with `d(g, h) <= L` for the first bound, and base
    /// points for the second.
    pub lemma_samples: usize,
    /// Base points are drawn from this ball.
    pub sample_radius: u32,
    pub seed: u64,
}

/// `c_{g h^-1 m(h)}` and `c_{m(g)}` stay within `Delta_1` over the known
/// window, for every listed edge `(g, h)`.
///
/// Along the way the two pseudo-orbit bounds used in the proof are evaluated
/// on sampled data: `d(h c_{m_{h^-1}}(t), g c_{m_{g^-1}}(t)) <= d(h, g) +
/// 6 delta` for `t <= L`, and with `f = g c_{m_{g^-1}}(t)`,
/// `d(g c_{m_{g^-1}}(t + i - 1), f c_{m_{f^-1}}(i)) <= 2 delta` for
/// `t <= J + Delta_2`, `i <= Delta_2`. Rays start at `c(1) = 1_G`, so
/// `d(f, g) = t - 1` and the second ray lags the first by one index.
pub fn check_consistency(
    po: &PseudoOrbit,
    constants: &ShadowingConstants,
    ctx: &GroupContext,
    cert: &HyperbolicityCertificate,
    pairs: &[(GroupElement, GroupElement)],
    opts: &ConsistencyOptions,
) -> Result<ConsistencyReport> {
    let delta = cert.delta;
    let threshold = constants.delta1;
    let mut rep = ConsistencyReport {
        ok: true,
        threshold,
        edges: Vec::new(),
        edge_violations: 0,
        first_lemma_checks: 0,
        first_lemma_violations: 0,
        first_lemma_max_excess: i64::MIN,
        second_lemma_checks: 0,
        second_lemma_violations: 0,
        second_lemma_max: 0,
        unshifted_second_lemma_violations: 0,
    };
    let mut cache: BTreeMap<GroupElement, (ConstructedPath, Vec<GroupElement>)> = BTreeMap::new();
    let mut get = |g: &GroupElement| -> Result<(ConstructedPath, Vec<GroupElement>)> {
        if let Some(v) = cache.get(g) {
            return Ok(v.clone());
        }
        let (path, _, st) = straightened_ray(g, po, constants, opts.depth, ctx)?;
        cache.insert(g.clone(), (path.clone(), st.ray.clone()));
        Ok((path, st.ray))
    };
    for (g, h) in pairs {
        if ctx.word_metric(g, h)? != 1 {
            return Err(Error::Precondition(format!(
                "{} and {} are not adjacent",
                ctx.format(g),
                ctx.format(h)
            )));
        }
        let shift = ctx.multiply(g, &ctx.inverse(h))?;
        let (pg, rg) = get(g)?;
        let (ph, rh) = get(h)?;
        let moved = |v: &[GroupElement]| -> Result<Segment> {
            Ok(Segment::new(
                1,
                v.iter()
                    .map(|e| ctx.multiply(&shift, e))
                    .collect::<Result<Vec<_>>>()?,
            ))
        };
        // c(g) starts at 1 and the moved c(h) at g h^-1, a conjugate of a
        // generator, so Delta_1 is taken for that start distance.
        let d_start = ctx.word_metric(&GroupElement::identity(), &shift)?;
        let edge_threshold = 2 * constants.big_k + d_start + 4 * delta;
        let margin = (edge_threshold + 2 * constants.big_k + 2 * delta + 1) as usize;
        let window = pg.depth().min(ph.depth()).saturating_sub(margin);
        let c2 = moved(&ph.values.values)?;
        let profile = pg.values.values[..window]
            .iter()
            .map(|e| distance_to_image(e, &c2, ctx))
            .collect::<Result<Vec<_>>>()?;
        let path_distance = profile.iter().copied().max().unwrap_or(0);
        let r2 = moved(&rh)?;
        let rwin = rg.len().min(rh.len()).saturating_sub(margin);
        let mut ray_distance = 0;
        for e in &rg[..rwin] {
            ray_distance = ray_distance.max(distance_to_image(e, &r2, ctx)?);
        }
        if path_distance > edge_threshold || ray_distance > edge_threshold {
            rep.edge_violations += 1;
        }
        rep.edges.push(EdgeCheck {
            g: ctx.format(g),
            h: ctx.format(h),
            threshold: edge_threshold,
            window: window as u32,
            path_distance,
            ray_distance,
            profile,
        });
    }

    let l = constants.big_l;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let one = GroupElement::identity();
    let ray_of = |u: &GroupElement, n: usize| -> Result<Vec<GroupElement>> {
        let m: Dsg = po.rep(&ctx.inverse(u), ctx)?;
        Ok(ray_from_dsg(&m, &one, n, ctx)?.values)
    };
    for _ in 0..opts.lemma_samples {
        let g = random_element(&mut rng, ctx, opts.sample_radius)?;
        let f = random_element(&mut rng, ctx, l)?;
        let h = ctx.multiply(&g, &f)?;
        let d = ctx.word_metric(&g, &h)?;
        let (cg, ch) = (ray_of(&g, l as usize)?, ray_of(&h, l as usize)?);
        for t in 0..l as usize {
            let dist = ctx.word_metric(&ctx.multiply(&h, &ch[t])?, &ctx.multiply(&g, &cg[t])?)?;
            rep.first_lemma_checks += 1;
            rep.first_lemma_max_excess = rep.first_lemma_max_excess.max(dist as i64 - d as i64);
            if dist > d + 6 * delta {
                rep.first_lemma_violations += 1;
            }
        }

        let (tmax, imax) = (
            (constants.j + constants.delta2) as usize,
            constants.delta2 as usize,
        );
        let cg = ray_of(&g, tmax + imax + 1)?;
        for t in 1..=tmax {
            let fp = ctx.multiply(&g, &cg[t - 1])?;
            let cf = ray_of(&fp, imax)?;
            for i in 1..=imax {
                let rhs = ctx.multiply(&fp, &cf[i - 1])?;
                let dist = ctx.word_metric(&ctx.multiply(&g, &cg[t + i - 2])?, &rhs)?;
                rep.second_lemma_checks += 1;
                rep.second_lemma_max = rep.second_lemma_max.max(dist);
                if dist > 2 * delta {
                    rep.second_lemma_violations += 1;
                }
                let unshifted = ctx.word_metric(&ctx.multiply(&g, &cg[t + i - 1])?, &rhs)?;
                if unshifted > 2 * delta {
                    rep.unshifted_second_lemma_violations += 1;
                }
            }
        }
    }
    if rep.first_lemma_checks == 0 {
        rep.first_lemma_max_excess = 0;
    }
    rep.ok = rep.edge_violations == 0
        && rep.first_lemma_violations == 0
        && rep.second_lemma_violations == 0;
    Ok(rep)
}

/// Edges `(g, g s)` with both ends in `B(radius)`, each once.
pub fn edges_in_ball(ctx: &GroupContext, radius: u32) -> Result<Vec<(GroupElement, GroupElement)>> {
    let ball = ctx.ball(radius)?;
    let mut out = Vec::new();
    for g in &ball {
        for s in ctx.alphabet().gens() {
            let h = ctx.mul_gen(g, s)?;
            if h.len() <= radius && g < &h {
                out.push((g.clone(), h));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{cover_for_l, CoverKind};
    use crate::geometry::certify_delta;
    use crate::shadowing::{derive_constants, DeriveOptions, Noise};

    fn setup() -> (GroupContext, HyperbolicityCertificate, ShadowingConstants) {
        let g = GroupContext::free(2);
        let cert = certify_delta(&g, 4, 64).unwrap();
        let c = derive_constants(5, &cert, &g, &DeriveOptions::for_group(&g, &cert)).unwrap();
        (g, cert, c)
    }

    #[test]
    fn periodic_fit() {
        let g = GroupContext::free(2);
        let a = g.alphabet();
        assert_eq!(
            fit_periodic(&g, &a.parse("aaaa").unwrap())
                .unwrap()
                .format(a),
            "a^∞"
        );
        assert_eq!(
            fit_periodic(&g, &a.parse("baBaBaB").unwrap())
                .unwrap()
                .format(a),
            "b(aB)^∞"
        );
        assert!(fit_periodic(&g, &a.parse("ab").unwrap()).is_none());
    }

    #[test]
    fn noiseless_shadow_is_x0() {
        let (g, cert, c) = setup();
        let x0 = BoundaryPoint::periodic(g.alphabet(), &[], &[0]).unwrap();
        let po = PseudoOrbit::lazy(x0.clone(), Noise::None, 56, 0);
        let out = shadow(&po, &c, &g, &cert, default_depth(&po, &c, 8)).unwrap();
        assert_eq!(out.x_fit, Some(x0));
        assert!(out.in_neighborhood);
        assert_eq!(out.proximity, 0);
    }

    #[test]
    fn wrong_point_fails_at_the_identity() {
        let (g, cert, _) = setup();
        let x0 = BoundaryPoint::periodic(g.alphabet(), &[], &[0]).unwrap();
        let po = PseudoOrbit::lazy(x0, Noise::None, 56, 0);
        let wrong = BoundaryPoint::periodic(g.alphabet(), &[], &[2]).unwrap();
        let u = cover_for_l(5, CoverKind::U, &g, &cert).unwrap();
        let r = verify_shadowing(&po, &wrong, &u, 2, &g, &cert, false).unwrap();
        assert!(!r.ok);
        assert!(r.failures.iter().any(|f| f.g.is_empty()));
    }

    #[test]
    fn edges_of_small_balls() {
        let g = GroupContext::free(2);
        assert_eq!(edges_in_ball(&g, 1).unwrap().len(), 4);
        // a tree: |B(2)| - 1 edges
        assert_eq!(edges_in_ball(&g, 2).unwrap().len(), 16);
    }

    #[test]
    fn consistency_on_a_noisy_orbit() {
        let (g, cert, c) = setup();
        let x0 = BoundaryPoint::periodic(g.alphabet(), &g.alphabet().parse("B").unwrap(), &[0, 2])
            .unwrap();
        let po = PseudoOrbit::lazy(x0, Noise::Tail { depth: 40 }, 56, 5);
        let pairs = edges_in_ball(&g, 1).unwrap();
        let opts = ConsistencyOptions {
            depth: 28,
            lemma_samples: 5,
            sample_radius: 4,
            seed: 1,
        };
        let r = check_consistency(&po, &c, &g, &cert, &pairs, &opts).unwrap();
        assert!(r.ok, "{r:?}");
        assert_eq!(r.edges.len(), 4);
        assert!(r.unshifted_second_lemma_violations > 0);
    }
}
