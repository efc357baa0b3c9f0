//! Directed systems of geodesics, their rays `c_m^g`, and the neighbourhoods
//! `N_m^{l,D}` and `N_x^l`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::point::BoundaryPoint;
use crate::error::{Error, Result};
use crate::geometry::HyperbolicityCertificate;
use crate::group::{Gen, GroupContext, GroupElement, Segment};

/// A map `m : G -> S` whose iterates `g, g m(g), ...` are geodesic rays.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Dsg {
    /// Free groups: the first letter of the geodesic from `g` to the point.
    Toward(BoundaryPoint),
    /// An explicit assignment on `B(radius)`.
    Table {
        radius: u32,
        assignment: BTreeMap<GroupElement, Gen>,
    },
    /// `(h m)(g) = m(h^-1 g)`.
    Shift(GroupElement, Box<Dsg>),
}

impl Dsg {
    /// `m(g)`.
    pub fn value(&self, g: &GroupElement, ctx: &GroupContext) -> Result<Gen> {
        match self {
            Dsg::Toward(x) => {
                if !ctx.is_free() {
                    return Err(Error::Precondition(
                        "pull-toward systems need a free group".into(),
                    ));
                }
                let w = g.word();
                for (i, &s) in w.iter().enumerate() {
                    if x.letter(i).map_err(|_| self.short(g))? != s {
                        return Ok(ctx.alphabet().inverse(*w.last().expect("non-empty")));
                    }
                }
                x.letter(w.len()).map_err(|_| self.short(g))
            }
            Dsg::Table { assignment, .. } => {
                assignment.get(g).copied().ok_or_else(|| self.short(g))
            }
            Dsg::Shift(h, m) => m.value(&ctx.multiply(&ctx.inverse(h), g)?, ctx),
        }
    }

    fn short(&self, g: &GroupElement) -> Error {
        Error::InsufficientSupport(format!(
            "element of length {} is outside the support (radius {:?})",
            g.len(),
            self.support_radius()
        ))
    }

    /// Radius of the ball on which `m` is defined (`None` when unbounded).
    pub fn support_radius(&self) -> Option<u32> {
        match self {
            Dsg::Toward(x) => x.depth().map(|d| d.saturating_sub(2) as u32),
            Dsg::Table { radius, .. } => Some(*radius),
            Dsg::Shift(h, m) => m.support_radius().map(|r| r.saturating_sub(h.len())),
        }
    }
}

/// `g m`, the shift action on assignments.
pub fn shift(g: &GroupElement, m: &Dsg) -> Dsg {
    Dsg::Shift(g.clone(), Box::new(m.clone()))
}

/// `c_m^g` on `[1, depth]`: `g, g m(g), g m(g) m(g m(g)), ...`, checked to be
/// geodesic.
pub fn ray_from_dsg(
    m: &Dsg,
    g: &GroupElement,
    depth: usize,
    ctx: &GroupContext,
) -> Result<Segment> {
    let mut values = Vec::with_capacity(depth);
    if depth > 0 {
        values.push(g.clone());
    }
    while values.len() < depth {
        let cur = values.last().expect("non-empty");
        let s = m.value(cur, ctx).map_err(|e| match e {
            Error::InsufficientSupport(_) => Error::DepthExceedsSupport {
                requested: depth as u32,
                radius: m.support_radius().unwrap_or(0),
            },
            e => e,
        })?;
        values.push(ctx.mul_gen(cur, s)?);
    }
    let seg = Segment::new(1, values);
    if depth > 1 && ctx.word_metric(seg.first(), seg.last())? as usize != depth - 1 {
        return Err(Error::PropositionViolated(format!(
            "iterates of the directed system from {} are not geodesic",
            ctx.format(g)
        )));
    }
    Ok(seg)
}

fn check_level(l: u32, d: u32, cert: &HyperbolicityCertificate) -> Result<()> {
    if l <= 8 * cert.delta {
        return Err(Error::Precondition(format!(
            "l = {l} must exceed 8 delta = {}",
            8 * cert.delta
        )));
    }
    if d < 2 * cert.delta {
        return Err(Error::Precondition(format!(
            "D = {d} is below 2 delta = {}",
            2 * cert.delta
        )));
    }
    Ok(())
}

fn support_error(e: Error) -> Error {
    match e {
        Error::DepthExceedsSupport { requested, radius } => Error::InsufficientSupport(format!(
            "rays to depth {requested} need more than support radius {radius}"
        )),
        e => e,
    }
}

/// `m2 in N_m^{l,D}`: `d(c_m^1(i), c_{m2}^1(i)) <= D` for all `i <= l`.
pub fn neighborhood_contains(
    m2: &Dsg,
    m: &Dsg,
    l: u32,
    d: u32,
    ctx: &GroupContext,
    cert: &HyperbolicityCertificate,
) -> Result<bool> {
    check_level(l, d, cert)?;
    let one = GroupElement::identity();
    let c = ray_from_dsg(m, &one, l as usize, ctx).map_err(support_error)?;
    let c2 = ray_from_dsg(m2, &one, l as usize, ctx).map_err(support_error)?;
    within(&c.values, &c2.values, d, ctx)
}

fn within(a: &[GroupElement], b: &[GroupElement], d: u32, ctx: &GroupContext) -> Result<bool> {
    for (x, y) in a.iter().zip(b) {
        if ctx.word_metric(x, y)? > d {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `d(g c_m^{g^-1}(i), c_{m2}^1(i)) <= D` for all `i <= l`.
pub fn translated_membership(
    g: &GroupElement,
    m: &Dsg,
    m2: &Dsg,
    l: u32,
    d: u32,
    ctx: &GroupContext,
    cert: &HyperbolicityCertificate,
) -> Result<bool> {
    check_level(l, d, cert)?;
    let c = ray_from_dsg(m, &ctx.inverse(g), l as usize, ctx).map_err(support_error)?;
    let moved = c
        .values
        .iter()
        .map(|v| ctx.multiply(g, v))
        .collect::<Result<Vec<_>>>()?;
    let c2 = ray_from_dsg(m2, &GroupElement::identity(), l as usize, ctx).map_err(support_error)?;
    within(&moved, &c2.values, d, ctx)
}

/// `y in N_x^l`.
///
/// In a free group every system converging to a point has the same ray from
/// `1_G`, so the quantifier over representatives collapses to one comparison
/// with `D = 0`. For truncated points only the stored rays are compared.
pub fn point_neighborhood_contains(
    y: &BoundaryPoint,
    x: &BoundaryPoint,
    l: u32,
    ctx: &GroupContext,
    cert: &HyperbolicityCertificate,
) -> Result<bool> {
    check_level(l, 2 * cert.delta, cert)?;
    if ctx.is_free() {
        // c(i) is the prefix of length i - 1.
        let n = l.saturating_sub(1) as usize;
        return Ok(y.prefix_word(n)? == x.prefix_word(n)?);
    }
    let cx = x.ray(l as usize)?;
    let cy = y.ray(l as usize)?;
    within(&cx.values, &cy.values, 2 * cert.delta, ctx)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DsgFromRay {
    pub dsg: Dsg,
    /// False when the assignment still changed at the last sample point.
    pub stabilized: bool,
    /// Last sample index at which some value changed.
    pub last_change: usize,
}

/// A directed system whose rays are asymptotic to `c` (based at `1_G`).
///
/// The last-letter field of the distinguished structure, re-rooted at `c(n)`,
/// points every `g` one step along a geodesic towards `c(n)`; the system is
/// the pointwise limit over the sample points `c(n)`, taken on
/// `B(support_radius)`. In a free group this limit is the pull towards the
/// end of `c`, returned directly.
pub fn dsg_from_ray(c: &Segment, support_radius: u32, ctx: &GroupContext) -> Result<DsgFromRay> {
    if c.values.first().is_none_or(|g| !g.is_identity()) {
        return Err(Error::InvalidInput(
            "the ray must start at the identity".into(),
        ));
    }
    if ctx.is_free() {
        let x = BoundaryPoint::from_prefix(c.last().word());
        if x.depth() != Some(c.values.len()) {
            return Err(Error::InvalidInput("the ray is not geodesic".into()));
        }
        let dsg = Dsg::Toward(x);
        if dsg.support_radius().unwrap_or(u32::MAX) < support_radius {
            return Err(Error::InsufficientDepth {
                needed: support_radius + 2,
                have: c.values.len() as u32,
            });
        }
        return Ok(DsgFromRay {
            dsg,
            stabilized: true,
            last_change: 0,
        });
    }
    let first = support_radius as usize + 2;
    if c.values.len() < first {
        return Err(Error::InsufficientDepth {
            needed: first as u32,
            have: c.values.len() as u32,
        });
    }
    let r_max = ctx.r_max().unwrap_or(0);
    let structure = ctx.distinguished_structure(r_max)?;
    let ball = ctx.ball(support_radius)?;
    let mut assignment: BTreeMap<GroupElement, Gen> = BTreeMap::new();
    let mut last_change = 0;
    // c(n) with |c(n)| = n - 1 > support_radius, so g != c(n) on the ball.
    for n in first..=c.values.len() {
        let f = &c.values[n - 1];
        let fi = ctx.inverse(f);
        for g in &ball {
            let s = structure
                .last_letter(&ctx.multiply(&fi, g)?)
                .ok_or_else(|| Error::OutOfCertifiedBall {
                    word: format!("<{}^-1 {}>", ctx.format(f), ctx.format(g)),
                    radius: r_max,
                })?;
            if assignment.insert(g.clone(), s) != Some(s) {
                last_change = n;
            }
        }
    }
    Ok(DsgFromRay {
        dsg: Dsg::Table {
            radius: support_radius,
            assignment,
        },
        stabilized: last_change < c.values.len(),
        last_change,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DsgAxiomReport {
    pub elements: u64,
    pub pairs: u64,
    pub max_excess: i64,
}

/// Both axioms on `B(radius)`: rays from every `g` are geodesic up to
/// `depth`, and `d(c_m^g(t), c_m^h(t)) <= d(g, h) + 4 delta` for all pairs.
pub fn check_dsg_axioms(
    m: &Dsg,
    radius: u32,
    depth: usize,
    ctx: &GroupContext,
    cert: &HyperbolicityCertificate,
) -> Result<DsgAxiomReport> {
    let ball = ctx.ball(radius)?;
    let rays = ball
        .iter()
        .map(|g| ray_from_dsg(m, g, depth, ctx))
        .collect::<Result<Vec<_>>>()?;
    let mut rep = DsgAxiomReport {
        elements: ball.len() as u64,
        pairs: 0,
        max_excess: i64::MIN,
    };
    for i in 0..ball.len() {
        for j in i + 1..ball.len() {
            rep.pairs += 1;
            let bound = ctx.word_metric(&ball[i], &ball[j])? + 4 * cert.delta;
            for (x, y) in rays[i].values.iter().zip(&rays[j].values) {
                let d = ctx.word_metric(x, y)?;
                let excess = d as i64 - bound as i64;
                rep.max_excess = rep.max_excess.max(excess);
                if excess > 0 {
                    return Err(Error::PropositionViolated(format!(
                        "rays from {} and {} drift to distance {d} > {bound}",
                        ctx.format(&ball[i]),
                        ctx.format(&ball[j])
                    )));
                }
            }
        }
    }
    Ok(rep)
}
