//! Pseudo-orbits `(x_g)` on a ball of the group, their chosen representatives
//! `m_g`, and the check `f m_g in N_{m_{fg}}^{L, 2 delta}`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ShadowingConstants;
use crate::boundary::{
    act, cover_for_l, dsg_from_ray, translated_membership, BoundaryPoint, BoundaryPointFile, Cover,
    CoverKind, Dsg,
};
use crate::error::{Error, Result};
use crate::geometry::HyperbolicityCertificate;
use crate::group::{Gen, GroupContext, GroupElement};

/// How the points of a generated pseudo-orbit leave the true orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Noise {
    None,
    /// `x_g` keeps the first `depth` letters of `g x0` and continues with a
    /// seeded random tail that leaves `g x0` at letter `depth`.
    Tail {
        depth: u32,
    },
}

/// A pseudo-orbit on `B(support_radius)`, evaluated lazily.
///
/// Points come from `x0`, the noise model and the seed; explicit overrides
/// win. Representatives are the canonical pull-towards systems in a free
/// group and systems built from the stored rays otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudoOrbit {
    pub x0: Option<BoundaryPoint>,
    pub noise: Noise,
    pub support_radius: u32,
    pub seed: u64,
    pub overrides: BTreeMap<GroupElement, BoundaryPoint>,
    pub v_cover: Option<Cover>,
}

fn mix(mut h: u64, v: u64) -> u64 {
    // splitmix64 finaliser
    h ^= v
        .wrapping_add(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(h << 6)
        .wrapping_add(h >> 2);
    h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    h = (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    h ^ (h >> 31)
}

fn element_seed(seed: u64, g: &GroupElement) -> u64 {
    g.word()
        .iter()
        .fold(mix(seed, g.len() as u64), |h, &s| mix(h, s as u64 + 1))
}

/// A letter uniformly among those different from `avoid`.
fn pick(rng: &mut ChaCha8Rng, ctx: &GroupContext, avoid: &[Gen]) -> Gen {
    let options: Vec<Gen> = ctx
        .alphabet()
        .gens()
        .filter(|s| !avoid.contains(s))
        .collect();
    options[rng.gen_range(0..options.len())]
}

impl PseudoOrbit {
    pub fn lazy(x0: BoundaryPoint, noise: Noise, support_radius: u32, seed: u64) -> Self {
        Self {
            x0: Some(x0),
            noise,
            support_radius,
            seed,
            overrides: BTreeMap::new(),
            v_cover: None,
        }
    }

    pub fn with_override(mut self, g: GroupElement, x: BoundaryPoint) -> Self {
        self.overrides.insert(g, x);
        self
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        g.len() <= self.support_radius
    }

    /// `x_g`.
    pub fn point(&self, g: &GroupElement, ctx: &GroupContext) -> Result<BoundaryPoint> {
        if !self.contains(g) {
            return Err(Error::SupportExhausted(format!(
                "{} has length {} > support radius {}",
                ctx.format(g),
                g.len(),
                self.support_radius
            )));
        }
        if let Some(x) = self.overrides.get(g) {
            return Ok(x.clone());
        }
        let x0 = self.x0.as_ref().ok_or_else(|| {
            Error::SupportExhausted(format!("no point stored for {}", ctx.format(g)))
        })?;
        let y = act(g, x0, ctx)?;
        match self.noise {
            Noise::None => Ok(y),
            Noise::Tail { depth } => self.perturb(&y, depth as usize, g, ctx),
        }
    }

    fn perturb(
        &self,
        y: &BoundaryPoint,
        depth: usize,
        g: &GroupElement,
        ctx: &GroupContext,
    ) -> Result<BoundaryPoint> {
        if !matches!(y, BoundaryPoint::Periodic { .. }) {
            return Err(Error::InvalidInput(
                "tail noise needs periodic points of a free group".into(),
            ));
        }
        let alpha = ctx.alphabet();
        let mut rng = ChaCha8Rng::seed_from_u64(element_seed(self.seed, g));
        let mut w = y.prefix_word(depth)?;
        let back = |w: &[Gen]| w.last().map(|&t| alpha.inverse(t));
        let mut avoid = vec![y.letter(depth)?];
        avoid.extend(back(&w));
        w.push(pick(&mut rng, ctx, &avoid));
        for _ in 0..rng.gen_range(0..4) {
            let a: Vec<Gen> = back(&w).into_iter().collect();
            w.push(pick(&mut rng, ctx, &a));
        }
        let first = pick(&mut rng, ctx, &back(&w).into_iter().collect::<Vec<_>>());
        let mut period = vec![first];
        if rng.gen_bool(0.5) {
            // avoiding first^-1 keeps the period cyclically reduced
            period.push(pick(&mut rng, ctx, &[alpha.inverse(first)]));
        }
        BoundaryPoint::periodic(alpha, &w, &period)
    }

    /// The chosen `m_g`.
    pub fn rep(&self, g: &GroupElement, ctx: &GroupContext) -> Result<Dsg> {
        representative(&self.point(g, ctx)?, ctx)
    }
}

/// `m in Q^{-1}(x)`.
pub fn representative(x: &BoundaryPoint, ctx: &GroupContext) -> Result<Dsg> {
    if ctx.is_free() {
        return Ok(Dsg::Toward(x.clone()));
    }
    let depth = x.depth().unwrap_or(0);
    let ray = x.ray(depth)?;
    let support = (depth as u32).saturating_sub(2) / 2;
    Ok(dsg_from_ray(&ray, support, ctx)?.dsg)
}

/// Random reduced word (free) or ball element of length at most `max_len`.
pub(crate) fn random_element(
    rng: &mut ChaCha8Rng,
    ctx: &GroupContext,
    max_len: u32,
) -> Result<GroupElement> {
    let n = rng.gen_range(0..=max_len);
    let alpha = ctx.alphabet();
    let mut w: Vec<Gen> = Vec::with_capacity(n as usize);
    for _ in 0..n {
        let a: Vec<Gen> = w.last().map(|&t| alpha.inverse(t)).into_iter().collect();
        w.push(pick(rng, ctx, &a));
    }
    ctx.normal_form(&w)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PseudoOrbitViolation {
    pub f: String,
    pub g: String,
    /// Which form of the definition failed.
    pub form: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PseudoOrbitCheck {
    pub ok: bool,
    pub pairs_checked: u64,
    pub targeted_pairs: u64,
    /// Pairs where the ray form and the cover form disagree.
    pub form_mismatches: u64,
    pub violations: Vec<PseudoOrbitViolation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOptions {
    /// Randomly drawn pairs `(f, g)`.
    pub samples: usize,
    pub seed: u64,
    /// Stop after this many violations.
    pub max_violations: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            samples: 500,
            seed: 0,
            max_violations: 16,
        }
    }
}

/// Evaluates `f m_g in N_{m_{fg}}^{L, 2 delta}` on sampled pairs with
/// `|f| <= F_radius` and `g, fg` in the support, and the cover form "`f x_g`
/// and `x_{fg}` share an element of V" on the same pairs.
///
/// The support is a ball of radius far beyond enumeration, so pairs are
/// drawn at random, with extra pairs aimed at cancellation between `f` and
/// `g` and at every overridden point.
pub fn check_pseudo_orbit(
    po: &PseudoOrbit,
    constants: &ShadowingConstants,
    ctx: &GroupContext,
    cert: &HyperbolicityCertificate,
    opts: &CheckOptions,
) -> Result<PseudoOrbitCheck> {
    let big_l = constants.big_l;
    let v_cover = match &po.v_cover {
        Some(c) => c.clone(),
        None => cover_for_l(big_l, CoverKind::V, ctx, cert)?,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut pairs: Vec<(GroupElement, GroupElement, bool)> = Vec::new();
    for i in 0..opts.samples {
        let g = random_element(&mut rng, ctx, po.support_radius)?;
        let f = if i % 2 == 0 || g.is_identity() {
            random_element(&mut rng, ctx, constants.f_radius)?
        } else {
            // undo a suffix of g, then wander
            let j = rng.gen_range(1..=g.len().min(constants.f_radius));
            let undo = ctx.inverse(&ctx.normal_form(&g.word()[g.len() as usize - j as usize..])?);
            let extra = random_element(&mut rng, ctx, constants.f_radius - j)?;
            ctx.multiply(&extra, &undo)?
        };
        pairs.push((f, g, false));
    }
    for o in po.overrides.keys() {
        let mut fs: Vec<GroupElement> = ctx.alphabet().gens().map(|s| ctx.generator(s)).collect();
        fs.push(GroupElement::identity());
        for _ in 0..8 {
            fs.push(random_element(&mut rng, ctx, constants.f_radius)?);
        }
        for f in fs {
            pairs.push((f.clone(), o.clone(), true));
            pairs.push((f.clone(), ctx.multiply(&ctx.inverse(&f), o)?, true));
        }
    }
    let mut rep = PseudoOrbitCheck {
        ok: true,
        pairs_checked: 0,
        targeted_pairs: 0,
        form_mismatches: 0,
        violations: Vec::new(),
    };
    for (f, g, targeted) in pairs {
        if f.len() > constants.f_radius || !po.contains(&g) {
            continue;
        }
        let fg = ctx.multiply(&f, &g)?;
        if !po.contains(&fg) {
            continue;
        }
        rep.pairs_checked += 1;
        rep.targeted_pairs += targeted as u64;
        let (xg, xfg) = (po.point(&g, ctx)?, po.point(&fg, ctx)?);
        let (mg, mfg) = (representative(&xg, ctx)?, representative(&xfg, ctx)?);
        let ray_form = translated_membership(&f, &mg, &mfg, big_l, 2 * cert.delta, ctx, cert)?;
        let fx = act(&f, &xg, ctx)?;
        let cover_form = v_cover.find_common(&[&fx, &xfg], ctx, cert)?.is_some();
        if ray_form != cover_form {
            rep.form_mismatches += 1;
        }
        for (bad, form) in [(!ray_form, "rays"), (!cover_form, "cover")] {
            if bad && rep.violations.len() < opts.max_violations {
                rep.violations.push(PseudoOrbitViolation {
                    f: ctx.format(&f),
                    g: ctx.format(&g),
                    form: form.into(),
                });
            }
        }
        rep.ok &= ray_form;
    }
    Ok(rep)
}

/// Generates a pseudo-orbit around the orbit of `x0` and checks it.
pub fn make_pseudo_orbit(
    x0: &BoundaryPoint,
    noise: Noise,
    constants: &ShadowingConstants,
    support_radius: u32,
    seed: u64,
    ctx: &GroupContext,
    cert: &HyperbolicityCertificate,
) -> Result<PseudoOrbit> {
    if support_radius < constants.f_radius {
        return Err(Error::InsufficientSupport(format!(
            "support radius {support_radius} is below F radius {}",
            constants.f_radius
        )));
    }
    if let Some(r) = ctx.r_max() {
        if support_radius > r {
            return Err(Error::InsufficientSupport(format!(
                "support radius {support_radius} exceeds the certified ball B({r})"
            )));
        }
    }
    if let Noise::Tail { depth } = noise {
        // f x_g keeps depth - |f| letters of f g x0, and L - 1 are needed
        if depth + 1 < 2 * constants.big_l {
            return Err(Error::PerturbationTooLarge(format!(
                "tail noise from depth {depth} can move f x_g out of N^L for |f| = {}",
                constants.big_l
            )));
        }
    }
    let mut po = PseudoOrbit::lazy(x0.clone(), noise, support_radius, seed);
    po.v_cover = Some(cover_for_l(constants.big_l, CoverKind::V, ctx, cert)?);
    let check = check_pseudo_orbit(
        &po,
        constants,
        ctx,
        cert,
        &CheckOptions {
            samples: 200,
            seed,
            max_violations: 1,
        },
    )?;
    if !check.ok {
        let v = &check.violations[0];
        return Err(Error::PerturbationTooLarge(format!(
            "pair f = {}, g = {} violates the pseudo-orbit condition",
            v.f, v.g
        )));
    }
    Ok(po)
}

/// `{"support_radius": r, "x0": ..., "noise": ..., "seed": s, "points":
/// {"<word>": <point>}, "reps": "canonical", "v_cover_ref": path}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PseudoOrbitFile {
    pub support_radius: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<BoundaryPointFile>,
    #[serde(default = "no_noise")]
    pub noise: Noise,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub points: BTreeMap<String, BoundaryPointFile>,
    #[serde(default = "canonical")]
    pub reps: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_cover_ref: Option<PathBuf>,
}

fn no_noise() -> Noise {
    Noise::None
}

fn canonical() -> String {
    "canonical".into()
}

impl PseudoOrbitFile {
    pub fn from_orbit(po: &PseudoOrbit, ctx: &GroupContext, v_cover_ref: Option<PathBuf>) -> Self {
        Self {
            support_radius: po.support_radius,
            x0: po
                .x0
                .as_ref()
                .map(|x| BoundaryPointFile::from_point(x, ctx.alphabet())),
            noise: po.noise,
            seed: po.seed,
            points: po
                .overrides
                .iter()
                .map(|(g, x)| {
                    (
                        ctx.format(g),
                        BoundaryPointFile::from_point(x, ctx.alphabet()),
                    )
                })
                .collect(),
            reps: canonical(),
            v_cover_ref,
        }
    }

    /// `base` resolves a relative `v_cover_ref`.
    pub fn to_orbit(&self, ctx: &GroupContext, base: &Path) -> Result<PseudoOrbit> {
        if self.reps != "canonical" {
            return Err(Error::InvalidInput(format!(
                "unknown representative rule {:?}",
                self.reps
            )));
        }
        let mut overrides = BTreeMap::new();
        for (w, x) in &self.points {
            let g = ctx.parse(w)?;
            if g.len() > self.support_radius {
                return Err(Error::InvalidInput(format!(
                    "point {w:?} lies outside the support"
                )));
            }
            overrides.insert(g, x.to_point(ctx)?);
        }
        let v_cover = match &self.v_cover_ref {
            Some(p) => Some(Cover::load(&base.join(p), ctx)?),
            None => None,
        };
        Ok(PseudoOrbit {
            x0: self.x0.as_ref().map(|x| x.to_point(ctx)).transpose()?,
            noise: self.noise,
            support_radius: self.support_radius,
            seed: self.seed,
            overrides,
            v_cover,
        })
    }
}
