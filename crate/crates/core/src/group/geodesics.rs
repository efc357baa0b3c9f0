use serde::{Deserialize, Serialize};

use super::{GroupContext, GroupElement, Segment};
use crate::error::Result;

/// Geodesics between two elements. `truncated` is set when the cap cut the
/// enumeration short; the list then holds the ShortLex-first paths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeodesicList {
    pub paths: Vec<Segment>,
    pub truncated: bool,
}

pub(super) fn enumerate(
    ctx: &GroupContext,
    g: &GroupElement,
    h: &GroupElement,
    cap: usize,
) -> Result<GeodesicList> {
    let x_len = ctx.word_metric(g, h)?;
    let Some(t) = ctx.ball.as_ref() else {
        let x = ctx.multiply(&ctx.inverse(g), h)?;
        // Trees have exactly one geodesic: the prefixes of the reduced word.
        let values = (0..=x.word().len())
            .map(|i| ctx.multiply(g, &GroupElement(x.word()[..i].to_vec())))
            .collect::<Result<Vec<_>>>()?;
        return Ok(GeodesicList {
            paths: vec![Segment::new(0, values)],
            truncated: false,
        });
    };

    // Descend the breadth-first distances to h, starting from g. Accepted
    // only when every geodesic from g to h provably stays in the table.
    let (gi, hi) = (ctx.index(g)?, ctx.index(h)?);
    let row = ctx.distance_row(hi);
    let m = row[gi as usize] as u32;
    if m != x_len || !ctx.inside_certified(g.len(), h.len(), m, t.radius()) {
        return Err(crate::error::Error::OutOfCertifiedBall {
            word: format!("<geodesics {} -> {}>", ctx.format(g), ctx.format(h)),
            radius: t.radius(),
        });
    }
    let mut capped = false;
    let raw = crate::geometry::descend_paths(t, &row, gi, cap, &mut capped);
    let paths = raw
        .into_iter()
        .map(|p| {
            Segment::new(
                0,
                p.into_iter()
                    .map(|y| GroupElement(t.word(y).to_vec()))
                    .collect(),
            )
        })
        .collect();
    Ok(GeodesicList {
        paths,
        truncated: capped,
    })
}

#[cfg(test)]
mod tests {
    use super::super::*;

    #[test]
    fn tree_geodesic_is_unique() {
        let g = GroupContext::free(2);
        let l = g
            .enumerate_geodesics(&GroupElement::identity(), &g.parse("ab").unwrap(), 10)
            .unwrap();
        assert_eq!(l.paths.len(), 1);
        let words: Vec<String> = l.paths[0].values.iter().map(|v| g.format(v)).collect();
        assert_eq!(words, ["", "a", "ab"]);
    }

    #[test]
    fn z2_diagonal_has_two_geodesics() {
        let a = GeneratorAlphabet::free(2);
        let rel = a.parse("abAB").unwrap();
        let g = GroupContext::presented(a, vec![rel], 6).unwrap();
        let l = g
            .enumerate_geodesics(&GroupElement::identity(), &g.parse("ab").unwrap(), 10)
            .unwrap();
        assert_eq!(l.paths.len(), 2);
        assert!(!l.truncated);
        // (0,0) -> (2,2): C(4,2) monotone lattice paths.
        let l = g
            .enumerate_geodesics(&g.parse("A").unwrap(), &g.parse("abb").unwrap(), 100)
            .unwrap();
        assert_eq!(l.paths.len(), 6);
        let capped = g
            .enumerate_geodesics(&g.parse("A").unwrap(), &g.parse("abb").unwrap(), 4)
            .unwrap();
        assert!(capped.truncated);
        assert_eq!(capped.paths[..], l.paths[..4]);
    }

    #[test]
    fn equal_endpoints_give_length_zero() {
        let g = GroupContext::free(2);
        let x = g.parse("aB").unwrap();
        let l = g.enumerate_geodesics(&x, &x, 10).unwrap();
        assert_eq!(l.paths, vec![Segment::new(0, vec![x])]);
    }
}
