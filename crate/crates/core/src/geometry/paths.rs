//! Operations on finite paths: Hausdorff distance, pointwise closeness of
//! geodesics, fellow travelling and gluing.

use serde::{Deserialize, Serialize};

use super::{is_quasi_geodesic, HyperbolicityCertificate, QuasiGeodesicParams};
use crate::error::{Error, Result};
use crate::group::{GroupContext, GroupElement, Segment};

/// `d(g, Img(path))`.
pub fn distance_to_image(g: &GroupElement, path: &Segment, ctx: &GroupContext) -> Result<u32> {
    let mut best = u32::MAX;
    for v in &path.values {
        best = best.min(ctx.word_metric(g, v)?);
        if best == 0 {
            break;
        }
    }
    Ok(best)
}

/// Symmetrised Hausdorff distance between the images of two paths.
pub fn hausdorff_distance(p: &Segment, q: &Segment, ctx: &GroupContext) -> Result<u32> {
    let mut h = 0;
    for v in &p.values {
        h = h.max(distance_to_image(v, q, ctx)?);
    }
    for v in &q.values {
        h = h.max(distance_to_image(v, p, ctx)?);
    }
    Ok(h)
}

/// Checks that consecutive values are one generator apart.
pub fn is_edge_path(path: &Segment, ctx: &GroupContext) -> Result<bool> {
    for w in path.values.windows(2) {
        if ctx.word_metric(&w[0], &w[1])? != 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A path is geodesic when its endpoints are exactly `length` apart.
pub fn is_geodesic(path: &Segment, ctx: &GroupContext) -> Result<bool> {
    if path.values.is_empty() {
        return Ok(true);
    }
    Ok(is_edge_path(path, ctx)?
        && ctx.word_metric(path.first(), path.last())? as usize == path.length())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosenessReport {
    #[serde(rename = "D")]
    pub d: u32,
    #[serde(rename = "T")]
    pub t: u32,
    pub bound: u32,
    /// Parameters `t` compared, i.e. `1..=last_compared` (0 when none).
    pub last_compared: i64,
    pub max_distance: u32,
}

/// Pointwise closeness of two geodesics `c, c' : [1, R] -> G`: for every
/// `t <= R - T - 2 delta`, `d(c(t), c'(t)) <= D + 4 delta`.
pub fn check_closeness(
    c: &Segment,
    c2: &Segment,
    ctx: &GroupContext,
    cert: &HyperbolicityCertificate,
) -> Result<ClosenessReport> {
    if c.values.len() != c2.values.len() || c.values.is_empty() {
        return Err(Error::Precondition(
            "closeness needs two non-empty geodesics on the same interval".into(),
        ));
    }
    if !is_geodesic(c, ctx)? || !is_geodesic(c2, ctx)? {
        return Err(Error::Precondition(
            "closeness inputs must be geodesics".into(),
        ));
    }
    let delta = cert.delta;
    let r = c.values.len() as i64;
    let d = ctx.word_metric(c.first(), c2.first())?;
    let t_end = ctx.word_metric(c.last(), c2.last())?;
    let bound = d + 4 * delta;
    let last = r - t_end as i64 - 2 * delta as i64;
    let mut max_distance = 0;
    for t in 1..=last.max(0) {
        let i = (t - 1) as usize;
        let dt = ctx.word_metric(&c.values[i], &c2.values[i])?;
        max_distance = max_distance.max(dt);
        if dt > bound {
            return Err(Error::PropositionViolated(format!(
                "d(c({t}), c'({t})) = {dt} > D + 4 delta = {bound} for c = [{}], c' = [{}]",
                fmt_path(c, ctx),
                fmt_path(c2, ctx)
            )));
        }
    }
    Ok(ClosenessReport {
        d,
        t: t_end,
        bound,
        last_compared: last.max(0),
        max_distance,
    })
}

pub(crate) fn fmt_path(p: &Segment, ctx: &GroupContext) -> String {
    p.values
        .iter()
        .map(|v| {
            let s = ctx.format(v);
            if s.is_empty() {
                "1".to_string()
            } else {
                s
            }
        })
        .collect::<Vec<_>>()
        .join(", ")
}

/// The `l` such that rays from a common point which `(l, D)`-fellow travel
/// actually `(l_target, 2 delta)`-fellow travel.
///
/// If `d(c(l), c'(l)) <= D` then `d(c(l), Img c') <= max(D, K)` and the
/// closeness lemma gives `2 delta` up to `l - max(D, K) - delta`.
pub fn fellow_travel_upgrade(
    l_target: u32,
    d: u32,
    k_context: u32,
    cert: &HyperbolicityCertificate,
) -> Result<u32> {
    if d < 2 * cert.delta {
        return Err(Error::Precondition(format!(
            "fellow-travel distance D = {d} is below 2 delta = {}",
            2 * cert.delta
        )));
    }
    Ok(l_target + d.max(k_context) + cert.delta)
}

/// Glues `c1` (up to parameter `n`) to `c2` (from its start on).
///
/// `c1` lives on `[n1, n2]` and `c2` on `[m1, m2]` via their `start`
/// fields. The result lives on `[n1, n + m2 - m1]`.
pub fn glue(
    c1: &Segment,
    c2: &Segment,
    n: i64,
    ctx: &GroupContext,
    cert: &HyperbolicityCertificate,
) -> Result<Segment> {
    let delta = cert.delta as i64;
    let (n1, n2) = (c1.start, c1.end_index());
    let m1 = c2.start;
    let mut failed = Vec::new();
    if !(n1 < n && n < n2) {
        failed.push(format!("n1 < n < n2 fails ({n1} < {n} < {n2})"));
    }
    if n2 - n <= n {
        failed.push(format!("n2 - n > n fails ({n2} - {n} <= {n})"));
    }
    if n <= 8 * delta {
        failed.push(format!("n > 8 delta fails ({n} <= {})", 8 * delta));
    }
    if failed.is_empty() {
        if !is_geodesic(c1, ctx)? {
            failed.push("c1 is not a geodesic".into());
        }
        if !is_geodesic(c2, ctx)? {
            failed.push("c2 is not a geodesic".into());
        }
        if c1.at(n) != c2.at(m1) {
            failed.push("c1(n) != c2(m1)".into());
        }
    }
    if failed.is_empty() {
        for i in 0..=n {
            match (c1.at(n + i), c2.at(m1 + i)) {
                (Some(a), Some(b)) => {
                    let d = ctx.word_metric(a, b)?;
                    if d > 2 * delta as u32 {
                        failed.push(format!(
                            "d(c1(n + {i}), c2(m1 + {i})) = {d} > 2 delta = {}",
                            2 * delta
                        ));
                        break;
                    }
                }
                _ => {
                    failed.push(format!("c2 is not defined at m1 + {i}"));
                    break;
                }
            }
        }
    }
    if !failed.is_empty() {
        return Err(Error::HypothesisViolated(failed.join("; ")));
    }
    let mut values: Vec<GroupElement> = c1.restrict(n1, n).values;
    values.extend(c2.values.iter().skip(1).cloned());
    let glued = Segment::new(n1, values);
    // Postcondition of the lemma, checked at the largest window (smaller
    // windows are implied).
    let params = QuasiGeodesicParams::global(1, 2 * cert.delta).with_window(n as u32);
    let check = is_quasi_geodesic(&glued, &params, ctx)?;
    if !check.ok {
        return Err(Error::PropositionViolated(format!(
            "glued path fails the {n}-local (1, 2 delta) check at {:?}",
            check.violation
        )));
    }
    Ok(glued)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(ctx: &GroupContext, start: i64, words: &[&str]) -> Segment {
        Segment::new(start, words.iter().map(|w| ctx.parse(w).unwrap()).collect())
    }

    fn tree_cert() -> HyperbolicityCertificate {
        HyperbolicityCertificate {
            delta: 0,
            radius_certified: 0,
            method: "test".into(),
            exact: true,
            triangles_checked: 0,
            witness: None,
        }
    }

    #[test]
    fn hausdorff_examples() {
        let g = GroupContext::free(2);
        let p = seg(&g, 0, &["", "a"]);
        let q = seg(&g, 0, &["", "b"]);
        // a is one step from 1 in Img q
        assert_eq!(hausdorff_distance(&p, &q, &g).unwrap(), 1);
        let r = seg(&g, 0, &["b", "bb"]);
        assert_eq!(hausdorff_distance(&p, &r, &g).unwrap(), 2);
        assert_eq!(hausdorff_distance(&p, &p, &g).unwrap(), 0);
        let longer = seg(&g, 0, &["", "a", "aa"]);
        assert_eq!(hausdorff_distance(&p, &longer, &g).unwrap(), 1);
    }

    #[test]
    fn fellow_travel_formula() {
        assert_eq!(fellow_travel_upgrade(5, 2, 0, &tree_cert()).unwrap(), 7);
        let mut c = tree_cert();
        c.delta = 1;
        assert!(fellow_travel_upgrade(5, 1, 0, &c).is_err());
    }

    #[test]
    fn glue_tail_of_geodesic_is_geodesic() {
        let g = GroupContext::free(2);
        let c1 = seg(&g, 1, &["", "a", "ab", "aba", "abab", "ababa"]);
        let c2 = seg(&g, 0, &["a", "ab", "aba", "abab", "ababa", "ababab"]);
        let glued = glue(&c1, &c2, 2, &g, &tree_cert()).unwrap();
        assert_eq!(glued.start, 1);
        assert!(is_geodesic(&glued, &g).unwrap());
        assert_eq!(glued.values.len(), 7);
    }

    #[test]
    fn glue_reports_failed_hypotheses() {
        let g = GroupContext::free(2);
        let c1 = seg(&g, 1, &["", "a", "ab", "aba"]);
        let c2 = seg(&g, 0, &["a", "aB"]);
        let err = glue(&c1, &c2, 2, &g, &tree_cert()).unwrap_err();
        assert!(matches!(err, Error::HypothesisViolated(_)));
    }
}
