//! The glued paths `c(g)`, the local quasi-geodesic check on their windows,
//! and straightening to a geodesic ray.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{PseudoOrbit, ShadowingConstants};
use crate::boundary::ray_from_dsg;
use crate::error::{Error, Result};
use crate::geometry::{distance_to_image, is_quasi_geodesic, QuasiGeodesicParams};
use crate::group::{GroupContext, GroupElement, Segment};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructedPath {
    pub g: GroupElement,
    /// `c(g)` on `[1, depth]`.
    pub values: Segment,
    /// `(r, h_r)` for every block after the first.
    pub breakpoints: Vec<(u32, GroupElement)>,
    /// For block `r`, `max_t d(h_r c(J + t), h_{r+1} c'(t))` over `t <= k + 1`,
    /// where both rays are available.
    pub seam_distances: Vec<u32>,
    /// Set when `h_r^{-1} g` left the support before `depth` was reached.
    pub support_exhausted: Option<String>,
}

impl ConstructedPath {
    pub fn depth(&self) -> usize {
        self.values.values.len()
    }
}

/// `c(g)` on `[1, depth]`.
///
/// `c(g)(i) = c_{m_g}(i)` for `i <= J`; then with `h_r = c(g)((r - 1)J)`,
/// `c(g)(i) = h_r c_{m_{h_r^{-1} g}}(i - (r - 1)J + 1)` on `[(r - 1)J, rJ]`.
pub fn construct_path(
    g: &GroupElement,
    po: &PseudoOrbit,
    constants: &ShadowingConstants,
    depth: usize,
    ctx: &GroupContext,
) -> Result<ConstructedPath> {
    let j = constants.j as usize;
    // rays run past the block end so the seam can be compared up to k + 1
    let ray_len = j + constants.k as usize + 2;
    let first = ray_from_dsg(
        &po.rep(g, ctx)?,
        &GroupElement::identity(),
        ray_len.max(j),
        ctx,
    )?;
    let mut values: Vec<GroupElement> = first.values[..j.min(depth)].to_vec();
    let mut breakpoints = Vec::new();
    let mut seam_distances = Vec::new();
    let mut support_exhausted = None;
    // previous block as (h, ray, offset): c(i) = h ray(i - offset)
    let mut prev = (GroupElement::identity(), first.values, 0usize);
    let mut r = 2;
    while values.len() < depth {
        let start = (r - 1) * j;
        let h = values[start - 1].clone();
        let hg = ctx.multiply(&ctx.inverse(&h), g)?;
        if !po.contains(&hg) {
            support_exhausted = Some(format!(
                "h_{r}^-1 g = {} leaves the support at depth {}",
                ctx.format(&hg),
                values.len()
            ));
            break;
        }
        let ray = ray_from_dsg(&po.rep(&hg, ctx)?, &GroupElement::identity(), ray_len, ctx)?.values;
        // the previous block ends where this one starts
        let (ph, pray, poff) = &prev;
        let end = ctx.multiply(ph, &pray[start - 1 - poff])?;
        if end != ctx.multiply(&h, &ray[0])? {
            return Err(Error::SeamMismatch(format!(
                "block {} ends at {} but h_{r} = {}",
                r - 1,
                ctx.format(&end),
                ctx.format(&h)
            )));
        }
        let mut seam = 0;
        for t in 1..=constants.k as usize + 1 {
            if let (Some(a), Some(b)) = (pray.get(start - 1 - poff + t - 1), ray.get(t - 1)) {
                seam = seam.max(ctx.word_metric(&ctx.multiply(ph, a)?, &ctx.multiply(&h, b)?)?);
            }
        }
        seam_distances.push(seam);
        for i in start + 1..=(r * j).min(depth) {
            values.push(ctx.multiply(&h, &ray[i - start])?);
        }
        breakpoints.push((r as u32, h.clone()));
        prev = (h, ray, start - 1);
        r += 1;
    }
    Ok(ConstructedPath {
        g: g.clone(),
        values: Segment::new(1, values),
        breakpoints,
        seam_distances,
        support_exhausted,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimWindow {
    pub from: i64,
    pub to: i64,
    pub window: u32,
    /// First failing pair `(s, t)`.
    pub violation: (i64, i64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimReport {
    pub ok: bool,
    pub windows_checked: u64,
    pub failures: Vec<ClaimWindow>,
    /// The whole path as a `k`-local `(1, 2 delta)`-quasi-geodesic.
    pub globally_local: bool,
    pub max_seam_distance: u32,
}

/// Every restriction to `[1, 2J]` and `[rJ, (r + 2)J]` is a `J'`-local
/// `(1, 2 delta)`-quasi-geodesic for `k <= J' <= J`, and so is the whole path
/// for `J' = k`.
pub fn check_claim(
    path: &ConstructedPath,
    constants: &ShadowingConstants,
    ctx: &GroupContext,
) -> Result<ClaimReport> {
    let j = constants.j as i64;
    let n = path.values.end_index();
    if n < 2 * j {
        return Err(Error::Precondition(format!(
            "path depth {n} is below 2J = {}",
            2 * j
        )));
    }
    let mut windows = vec![(1, 2 * j)];
    let mut r = 1;
    while r * j < n {
        windows.push((r * j, ((r + 2) * j).min(n)));
        r += 1;
    }
    let mut rep = ClaimReport {
        ok: true,
        windows_checked: 0,
        failures: Vec::new(),
        globally_local: true,
        max_seam_distance: path.seam_distances.iter().copied().max().unwrap_or(0),
    };
    let base = QuasiGeodesicParams::global(1, 2 * constants.delta);
    for &(from, to) in &windows {
        let seg = path.values.restrict(from, to);
        for jp in constants.k..=constants.j {
            rep.windows_checked += 1;
            let c = is_quasi_geodesic(&seg, &base.with_window(jp), ctx)?;
            if let Some(v) = c.violation {
                rep.ok = false;
                rep.failures.push(ClaimWindow {
                    from,
                    to,
                    window: jp,
                    violation: v,
                });
                break;
            }
        }
    }
    let whole = is_quasi_geodesic(&path.values, &constants.local_params(), ctx)?;
    rep.globally_local = whole.ok;
    rep.ok &= whole.ok;
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Straightened {
    /// `r(g)` on `[1, d(1, c(depth)) + 1]`.
    pub ray: Vec<GroupElement>,
    /// Survivors at the last layer.
    pub survivors: u64,
    /// `max_t d(r(t), Img c)`.
    pub max_distance: u32,
}

/// A geodesic from `1_G` to within `K` of the end of the path, all of whose
/// points are within `K` of the path.
///
/// Layer `t` holds the elements at distance `t - 1` from `1_G` reachable by
/// such geodesics, each with the ShortLex-least chain leading to it; the
/// least chain ending within `K` of `c(depth)` is returned.
pub fn straighten(
    path: &ConstructedPath,
    constants: &ShadowingConstants,
    ctx: &GroupContext,
) -> Result<Straightened> {
    let big_k = constants.big_k;
    let c = &path.values;
    let last = c.last();
    let target = ctx.word_metric(&GroupElement::identity(), last)?;
    let reach = target.saturating_sub(big_k) as usize;
    // parents[t][i] is the rank in layer t - 1 of the parent of layers[t][i]
    let mut layers: Vec<Vec<GroupElement>> = vec![vec![GroupElement::identity()]];
    let mut parents: Vec<Vec<usize>> = vec![vec![0]];
    for t in 0..target as usize {
        let mut next: BTreeMap<GroupElement, usize> = BTreeMap::new();
        for (rank, e) in layers[t].iter().enumerate() {
            for s in ctx.alphabet().gens() {
                let f = ctx.mul_gen(e, s)?;
                if f.len() as usize != t + 1 || next.contains_key(&f) {
                    continue;
                }
                if distance_to_image(&f, c, ctx)? <= big_k {
                    next.insert(f, rank);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        // order by (parent rank, element), which is the ShortLex order of chains
        let mut layer: Vec<(usize, GroupElement)> = next.into_iter().map(|(f, p)| (p, f)).collect();
        layer.sort();
        parents.push(layer.iter().map(|(p, _)| *p).collect());
        layers.push(layer.into_iter().map(|(_, f)| f).collect());
    }
    let mut pick = None;
    for t in (reach..layers.len()).rev() {
        for (i, e) in layers[t].iter().enumerate() {
            if ctx.word_metric(e, last)? <= big_k {
                pick = Some((t, i));
                break;
            }
        }
        if pick.is_some() {
            break;
        }
    }
    let (t_end, mut i) = pick.ok_or_else(|| {
        Error::NoRayWithinK(format!(
            "no geodesic from 1 stays within K = {big_k} of c({}) up to its end",
            ctx.format(&path.g)
        ))
    })?;
    let survivors = layers[t_end].len() as u64;
    let mut ray = vec![GroupElement::identity(); t_end + 1];
    for t in (0..=t_end).rev() {
        ray[t] = layers[t][i].clone();
        i = parents[t][i];
    }
    let mut max_distance = 0;
    for e in &ray {
        max_distance = max_distance.max(distance_to_image(e, c, ctx)?);
    }
    Ok(Straightened {
        ray,
        survivors,
        max_distance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::BoundaryPoint;
    use crate::geometry::certify_delta;
    use crate::shadowing::{derive_constants, DeriveOptions, Noise};

    fn setup() -> (GroupContext, ShadowingConstants) {
        let g = GroupContext::free(2);
        let cert = certify_delta(&g, 4, 64).unwrap();
        let c = derive_constants(5, &cert, &g, &DeriveOptions::for_group(&g, &cert)).unwrap();
        (g, c)
    }

    fn prefixes(x: &BoundaryPoint, n: usize) -> Vec<GroupElement> {
        x.ray(n).unwrap().values
    }

    #[test]
    fn noiseless_path_is_the_ray_of_x0() {
        let (g, c) = setup();
        let x0 = BoundaryPoint::periodic(g.alphabet(), &g.alphabet().parse("b").unwrap(), &[0, 3])
            .unwrap();
        let po = PseudoOrbit::lazy(x0.clone(), Noise::None, 56, 0);
        let p = construct_path(&GroupElement::identity(), &po, &c, 30, &g).unwrap();
        assert_eq!(p.values.values, prefixes(&x0, 30));
        assert_eq!(p.breakpoints.len(), 4);
        assert!(p.support_exhausted.is_none());
        assert!(check_claim(&p, &c, &g).unwrap().ok);
        let s = straighten(&p, &c, &g).unwrap();
        assert_eq!(s.ray, p.values.values);
        assert_eq!(s.max_distance, 0);
    }

    #[test]
    fn first_block_is_the_ray_of_m_g() {
        let (g, c) = setup();
        let x0 = BoundaryPoint::periodic(g.alphabet(), &[], &[0]).unwrap();
        let po = PseudoOrbit::lazy(x0.clone(), Noise::Tail { depth: 40 }, 56, 3);
        let h = g.parse("Ba").unwrap();
        let p = construct_path(&h, &po, &c, c.j as usize, &g).unwrap();
        let m = po.rep(&h, &g).unwrap();
        let ray = ray_from_dsg(&m, &GroupElement::identity(), c.j as usize, &g).unwrap();
        assert_eq!(p.values, ray);
    }

    #[test]
    fn support_runs_out() {
        let (g, c) = setup();
        let x0 = BoundaryPoint::periodic(g.alphabet(), &[], &[0]).unwrap();
        let po = PseudoOrbit::lazy(x0, Noise::None, 10, 0);
        let p = construct_path(&GroupElement::identity(), &po, &c, 40, &g).unwrap();
        assert!(p.support_exhausted.is_some());
        assert!(p.depth() < 40);
    }

    #[test]
    fn straighten_returns_the_geodesic_to_the_end() {
        let (g, mut c) = setup();
        // a spur at ab; with K = 1 the geodesic a a a stays within 1 of it
        c.big_k = 1;
        let w = ["", "a", "ab", "a", "aa", "aaa"];
        let p = ConstructedPath {
            g: GroupElement::identity(),
            values: Segment::new(1, w.iter().map(|s| g.parse(s).unwrap()).collect()),
            breakpoints: vec![],
            seam_distances: vec![],
            support_exhausted: None,
        };
        let s = straighten(&p, &c, &g).unwrap();
        let got: Vec<String> = s.ray.iter().map(|e| g.format(e)).collect();
        assert_eq!(got, ["", "a", "aa", "aaa"]);
    }
}
