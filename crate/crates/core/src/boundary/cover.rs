//! Finite covers of the boundary by basic neighbourhoods `N_x^l`.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::dsg::point_neighborhood_contains;
use super::point::{BoundaryPoint, BoundaryPointFile};
use crate::error::{Error, Result};
use crate::geometry::{fellow_travel_upgrade, HyperbolicityCertificate};
use crate::group::{Gen, GroupContext, GroupElement};

/// Listing every cylinder above this count is refused; such covers are kept
/// implicit.
pub const MAX_LISTED: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoverKind {
    U,
    V,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverElement {
    pub center: BoundaryPoint,
    pub l: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoverElements {
    Listed(Vec<CoverElement>),
    /// Every `N_x^l` for one level `l`. In a free group these are the
    /// cylinders on words of length `l - 1`, a finite family.
    AllAtLevel(u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cover {
    pub kind: CoverKind,
    pub elements: CoverElements,
    /// Guaranteed level: two points sharing an element lie in each other's
    /// `N^l` at this level. `None` for covers read from files.
    pub guaranteed_l: Option<u32>,
}

impl Cover {
    pub fn len_hint(&self, ctx: &GroupContext) -> Option<usize> {
        match &self.elements {
            CoverElements::Listed(v) => Some(v.len()),
            CoverElements::AllAtLevel(l) if ctx.is_free() => {
                cylinder_count(ctx, l.saturating_sub(1))
            }
            CoverElements::AllAtLevel(_) => None,
        }
    }

    /// An element containing every point of `points`.
    pub fn find_common(
        &self,
        points: &[&BoundaryPoint],
        ctx: &GroupContext,
        cert: &HyperbolicityCertificate,
    ) -> Result<Option<CoverElement>> {
        let contains_all = |e: &CoverElement| -> Result<bool> {
            for y in points {
                if !point_neighborhood_contains(y, &e.center, e.l, ctx, cert)? {
                    return Ok(false);
                }
            }
            Ok(true)
        };
        match &self.elements {
            CoverElements::AllAtLevel(l) => {
                // Candidate centres are the points themselves.
                for x in points {
                    let e = CoverElement {
                        center: (*x).clone(),
                        l: *l,
                    };
                    if contains_all(&e)? {
                        return Ok(Some(e));
                    }
                }
                Ok(None)
            }
            CoverElements::Listed(v) if ctx.is_free() && !points.is_empty() => {
                // An element is a cylinder on a prefix of the common prefix.
                let top = v.iter().map(|e| e.l).max().unwrap_or(1).saturating_sub(1) as usize;
                let common = common_prefix(points, top)?;
                for e in v {
                    let n = e.l.saturating_sub(1) as usize;
                    if n <= common.len() && e.center.prefix_word(n)? == common[..n] {
                        return Ok(Some(e.clone()));
                    }
                }
                Ok(None)
            }
            CoverElements::Listed(v) => {
                for e in v {
                    if contains_all(e)? {
                        return Ok(Some(e.clone()));
                    }
                }
                Ok(None)
            }
        }
    }

    pub fn save(&self, path: &Path, ctx: &GroupContext) -> Result<()> {
        let file = CoverFile::from_cover(self, ctx);
        std::fs::write(path, serde_json::to_string_pretty(&file)? + "\n")?;
        Ok(())
    }

    pub fn load(path: &Path, ctx: &GroupContext) -> Result<Self> {
        let file: CoverFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        file.to_cover(ctx)
    }
}

fn common_prefix(points: &[&BoundaryPoint], cap: usize) -> Result<Vec<Gen>> {
    let mut common = points[0].prefix_word(cap)?;
    for y in &points[1..] {
        let w = y.prefix_word(common.len())?;
        let n = common.iter().zip(&w).take_while(|(a, b)| a == b).count();
        common.truncate(n);
    }
    Ok(common)
}

fn cylinder_count(ctx: &GroupContext, n: u32) -> Option<usize> {
    let k = ctx.alphabet().len();
    if n == 0 {
        return Some(1);
    }
    let mut c = k;
    for _ in 1..n {
        c = c.checked_mul(k - 1)?;
    }
    Some(c)
}

/// Reduced words of length `n`, in ShortLex order.
pub fn reduced_words(ctx: &GroupContext, n: usize) -> Vec<Vec<Gen>> {
    let alpha = ctx.alphabet();
    let mut layer = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for w in &layer {
            for s in alpha.gens() {
                if w.last().is_some_and(|&t| t == alpha.inverse(s)) {
                    continue;
                }
                let mut v = w.clone();
                v.push(s);
                next.push(v);
            }
        }
        layer = next;
    }
    layer
}

/// A periodic point beginning with the reduced word `w`: `w s^oo` for the
/// least letter `s` that does not cancel.
pub fn point_through(ctx: &GroupContext, w: &[Gen]) -> Result<BoundaryPoint> {
    let alpha = ctx.alphabet();
    let s = alpha
        .gens()
        .find(|&s| w.last().is_none_or(|&t| t != alpha.inverse(s)))
        .ok_or_else(|| Error::InvalidInput("empty alphabet".into()))?;
    BoundaryPoint::periodic(alpha, w, &[s])
}

/// Sample boundary points whose rays are known to `depth`: in a free group
/// one point through every reduced word of length `depth - 1`, otherwise the
/// ShortLex geodesic rays to the sphere of radius `depth - 1`.
pub fn sample_points(ctx: &GroupContext, depth: u32, cap: usize) -> Result<Vec<BoundaryPoint>> {
    let n = depth.saturating_sub(1);
    if ctx.is_free() {
        if cylinder_count(ctx, n).is_none_or(|c| c > cap) {
            return Err(Error::BudgetExceeded {
                what: "boundary sampling",
                budget: cap as u64,
            });
        }
        return reduced_words(ctx, n as usize)
            .iter()
            .map(|w| point_through(ctx, w))
            .collect();
    }
    let mut out = Vec::new();
    for g in ctx.ball(n)?.into_iter().filter(|g| g.len() == n) {
        let ray = (0..=n as usize)
            .map(|i| GroupElement::from_normal_form(g.word()[..i].to_vec()))
            .collect();
        out.push(BoundaryPoint::truncated(ray, ctx)?);
        if out.len() > cap {
            return Err(Error::BudgetExceeded {
                what: "boundary sampling",
                budget: cap as u64,
            });
        }
    }
    Ok(out)
}

/// A cover whose elements are small at level `l`: any two points in one
/// element lie in each other's `N^l`.
///
/// Elements are `N_x^{l'}` with `l' = l + 4 delta + delta`, chosen greedily
/// over sample points at depth `l'`. In a free group `l' = l` and the result
/// is the set of cylinders on words of length `l - 1`, kept implicit when
/// there are more than [`MAX_LISTED`] of them.
pub fn cover_for_l(
    l: u32,
    kind: CoverKind,
    ctx: &GroupContext,
    cert: &HyperbolicityCertificate,
) -> Result<Cover> {
    if l <= 8 * cert.delta {
        return Err(Error::Precondition(format!(
            "l = {l} must exceed 8 delta = {}",
            8 * cert.delta
        )));
    }
    let l2 = fellow_travel_upgrade(l, 4 * cert.delta, 0, cert)?;
    if ctx.is_free() && cylinder_count(ctx, l2 - 1).is_none_or(|c| c > MAX_LISTED) {
        return Ok(Cover {
            kind,
            elements: CoverElements::AllAtLevel(l2),
            guaranteed_l: Some(l),
        });
    }
    let samples = sample_points(ctx, l2, MAX_LISTED)?;
    let mut chosen: Vec<CoverElement> = Vec::new();
    for x in &samples {
        let mut covered = false;
        for e in &chosen {
            if point_neighborhood_contains(x, &e.center, e.l, ctx, cert)? {
                covered = true;
                break;
            }
        }
        if !covered {
            chosen.push(CoverElement {
                center: x.clone(),
                l: l2,
            });
        }
    }
    Ok(Cover {
        kind,
        elements: CoverElements::Listed(chosen),
        guaranteed_l: Some(l),
    })
}

/// Least `l > 8 delta` such that any two sample points (at `sample_depth`)
/// with `y in N_x^l` share an element of the cover.
pub fn lebesgue_l(
    cover: &Cover,
    ctx: &GroupContext,
    cert: &HyperbolicityCertificate,
    sample_depth: u32,
) -> Result<u32> {
    let samples = sample_points(ctx, sample_depth, 20_000)?;
    for l in 8 * cert.delta + 1..=sample_depth {
        if ctx.is_free() {
            // Pairs that split right after a word w of length l - 1 exist
            // whenever sample_depth > l, and those are the hardest pairs.
            if lebesgue_free(cover, ctx, cert, l, sample_depth)? {
                return Ok(l);
            }
            continue;
        }
        let mut ok = true;
        'pairs: for (i, x) in samples.iter().enumerate() {
            for y in &samples[i..] {
                if point_neighborhood_contains(y, x, l, ctx, cert)?
                    && cover.find_common(&[x, y], ctx, cert)?.is_none()
                {
                    ok = false;
                    break 'pairs;
                }
            }
        }
        if ok {
            return Ok(l);
        }
    }
    Err(Error::NotFoundWithinDepth(sample_depth))
}

fn lebesgue_free(
    cover: &Cover,
    ctx: &GroupContext,
    cert: &HyperbolicityCertificate,
    l: u32,
    sample_depth: u32,
) -> Result<bool> {
    let n = (l - 1) as usize;
    let alpha = ctx.alphabet();
    for w in reduced_words(ctx, n) {
        if (l as usize) < sample_depth as usize {
            // two points through w that split immediately after it
            let mut next = alpha
                .gens()
                .filter(|&s| w.last().is_none_or(|&t| t != alpha.inverse(s)));
            let (s1, s2) = (next.next(), next.next());
            if let (Some(s1), Some(s2)) = (s1, s2) {
                let mut w1 = w.clone();
                w1.push(s1);
                let mut w2 = w.clone();
                w2.push(s2);
                let (x, y) = (point_through(ctx, &w1)?, point_through(ctx, &w2)?);
                if cover.find_common(&[&x, &y], ctx, cert)?.is_none() {
                    return Ok(false);
                }
                continue;
            }
        }
        let x = point_through(ctx, &w)?;
        if cover.find_common(&[&x], ctx, cert)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverElementFile {
    pub center: BoundaryPointFile,
    pub l: u32,
}

/// `{"kind": "U", "elements": [{"center": ..., "l": 5}, ...]}` or
/// `{"kind": "V", "all_at_level": 20}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverFile {
    pub kind: CoverKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<CoverElementFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub all_at_level: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guaranteed_l: Option<u32>,
}

impl CoverFile {
    pub fn from_cover(c: &Cover, ctx: &GroupContext) -> Self {
        let (elements, all_at_level) = match &c.elements {
            CoverElements::Listed(v) => (
                Some(
                    v.iter()
                        .map(|e| CoverElementFile {
                            center: BoundaryPointFile::from_point(&e.center, ctx.alphabet()),
                            l: e.l,
                        })
                        .collect(),
                ),
                None,
            ),
            CoverElements::AllAtLevel(l) => (None, Some(*l)),
        };
        Self {
            kind: c.kind,
            elements,
            all_at_level,
            guaranteed_l: c.guaranteed_l,
        }
    }

    pub fn to_cover(&self, ctx: &GroupContext) -> Result<Cover> {
        let elements = match (&self.elements, self.all_at_level) {
            (Some(v), None) => {
                let mut seen = BTreeSet::new();
                let mut out = Vec::new();
                for e in v {
                    let center = e.center.to_point(ctx)?;
                    if seen.insert((center.clone(), e.l)) {
                        out.push(CoverElement { center, l: e.l });
                    }
                }
                CoverElements::Listed(out)
            }
            (None, Some(l)) => CoverElements::AllAtLevel(l),
            _ => {
                return Err(Error::InvalidInput(
                    "a cover file needs exactly one of `elements` and `all_at_level`".into(),
                ))
            }
        };
        Ok(Cover {
            kind: self.kind,
            elements,
            guaranteed_l: self.guaranteed_l,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cert0() -> HyperbolicityCertificate {
        HyperbolicityCertificate {
            delta: 0,
            radius_certified: 8,
            method: "test".into(),
            exact: true,
            triangles_checked: 0,
            witness: None,
        }
    }

    fn listed(g: &GroupContext, words: &[&str], l: u32) -> Cover {
        let elements = words
            .iter()
            .map(|w| CoverElement {
                center: point_through(g, &g.alphabet().parse(w).unwrap()).unwrap(),
                l,
            })
            .collect();
        Cover {
            kind: CoverKind::U,
            elements: CoverElements::Listed(elements),
            guaranteed_l: None,
        }
    }

    #[test]
    fn whole_space_has_minimal_level() {
        let g = GroupContext::free(2);
        assert_eq!(
            lebesgue_l(&listed(&g, &[""], 1), &g, &cert0(), 6).unwrap(),
            1
        );
    }

    #[test]
    fn first_letter_cylinders() {
        let g = GroupContext::free(2);
        let c = listed(&g, &["a", "A", "b", "B"], 2);
        assert_eq!(lebesgue_l(&c, &g, &cert0(), 6).unwrap(), 2);
        let partial = listed(&g, &["a", "A", "b"], 2);
        assert_eq!(
            lebesgue_l(&partial, &g, &cert0(), 6),
            Err(Error::NotFoundWithinDepth(6))
        );
    }

    #[test]
    fn cylinders_at_level_two_from_cover_for_l() {
        let g = GroupContext::free(2);
        let c = cover_for_l(2, CoverKind::U, &g, &cert0()).unwrap();
        match &c.elements {
            CoverElements::Listed(v) => assert_eq!(v.len(), 4),
            other => panic!("{other:?}"),
        }
        // pairwise containment over all depth-4 words
        let pts = sample_points(&g, 5, 1000).unwrap();
        for x in &pts {
            for y in &pts {
                if let Some(e) = c.find_common(&[x, y], &g, &cert0()).unwrap() {
                    assert!(e.l >= 2);
                    assert!(point_neighborhood_contains(y, x, 2, &g, &cert0()).unwrap());
                    assert!(point_neighborhood_contains(x, y, 2, &g, &cert0()).unwrap());
                }
            }
        }
        assert_eq!(lebesgue_l(&c, &g, &cert0(), 6).unwrap(), 2);
    }

    #[test]
    fn large_levels_stay_implicit() {
        let g = GroupContext::free(2);
        let c = cover_for_l(20, CoverKind::V, &g, &cert0()).unwrap();
        assert_eq!(c.elements, CoverElements::AllAtLevel(20));
        let a = g.alphabet();
        let x = BoundaryPoint::periodic(a, &[], &[0]).unwrap();
        let y = BoundaryPoint::periodic(a, &[0; 19], &[2]).unwrap();
        let z = BoundaryPoint::periodic(a, &[0; 18], &[2]).unwrap();
        assert!(c.find_common(&[&x, &y], &g, &cert0()).unwrap().is_some());
        assert!(c.find_common(&[&x, &z], &g, &cert0()).unwrap().is_none());
    }

    #[test]
    fn precondition_on_level() {
        let g = GroupContext::free(2);
        let mut c = cert0();
        c.delta = 1;
        assert!(matches!(
            cover_for_l(8, CoverKind::U, &g, &c),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn file_round_trip() {
        let g = GroupContext::free(2);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("u.json");
        for c in [
            cover_for_l(3, CoverKind::U, &g, &cert0()).unwrap(),
            cover_for_l(20, CoverKind::V, &g, &cert0()).unwrap(),
        ] {
            c.save(&p, &g).unwrap();
            assert_eq!(Cover::load(&p, &g).unwrap(), c);
        }
    }
}
