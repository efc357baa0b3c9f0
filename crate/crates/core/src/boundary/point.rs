//! Boundary points and the action of the group on them.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Gen, GeneratorAlphabet, GroupContext, GroupElement, Segment};

/// A point of the Gromov boundary.
///
/// `Periodic` is the infinite reduced word `prefix period period ...` of a
/// free group, kept in a canonical form so that equality is structural.
/// `Truncated` is a geodesic ray from `1_G` known on `[1, depth]`; in a free
/// group its values are the prefixes of a reduced word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryPoint {
    Periodic { prefix: Vec<Gen>, period: Vec<Gen> },
    Truncated { ray: Vec<GroupElement> },
}

impl BoundaryPoint {
    /// `prefix period^oo` in canonical form: the period is primitive and
    /// cyclically reduced, nothing cancels across the seams, and the prefix
    /// is as short as possible.
    pub fn periodic(alpha: &GeneratorAlphabet, prefix: &[Gen], period: &[Gen]) -> Result<Self> {
        let q = alpha.free_reduce(period);
        if q.is_empty() {
            return Err(Error::InvalidInput(
                "the period of a boundary point must not be trivial".into(),
            ));
        }
        // q = u r u^-1 with r cyclically reduced gives q^oo = u r^oo.
        let mut u = 0;
        while u < q.len() / 2 && q[u] == alpha.inverse(q[q.len() - 1 - u]) {
            u += 1;
        }
        let mut p = prefix.to_vec();
        p.extend_from_slice(&q[..u]);
        let mut r = q[u..q.len() - u].to_vec();
        Ok(Self::settle(alpha, alpha.free_reduce(&p), &mut r))
    }

    fn settle(alpha: &GeneratorAlphabet, mut p: Vec<Gen>, r: &mut Vec<Gen>) -> Self {
        while p.last().is_some_and(|&s| s == alpha.inverse(r[0])) {
            p.pop();
            r.rotate_left(1);
        }
        let n = r.len();
        if let Some(d) = (1..=n).find(|&d| n.is_multiple_of(d) && (d..n).all(|i| r[i] == r[i - d]))
        {
            r.truncate(d);
        }
        while p
            .last()
            .is_some_and(|&s| s == *r.last().expect("non-empty period"))
        {
            p.pop();
            r.rotate_right(1);
        }
        Self::Periodic {
            prefix: p,
            period: std::mem::take(r),
        }
    }

    /// A truncated ray, checked to start at `1_G` and to move one generator
    /// at a time.
    pub fn truncated(ray: Vec<GroupElement>, ctx: &GroupContext) -> Result<Self> {
        if ray.first().is_none_or(|g| !g.is_identity()) {
            return Err(Error::InvalidInput(
                "a boundary ray must start at the identity".into(),
            ));
        }
        for w in ray.windows(2) {
            if ctx.word_metric(&w[0], &w[1])? != 1 {
                return Err(Error::InvalidInput(format!(
                    "boundary ray jumps from {} to {}",
                    ctx.format(&w[0]),
                    ctx.format(&w[1])
                )));
            }
        }
        Ok(Self::Truncated { ray })
    }

    /// Prefix ray of a finite reduced word in a free group.
    pub fn from_prefix(word: &[Gen]) -> Self {
        Self::Truncated {
            ray: (0..=word.len())
                .map(|i| GroupElement::from_normal_form(word[..i].to_vec()))
                .collect(),
        }
    }

    /// Number of ray points known (`None` for infinite words).
    pub fn depth(&self) -> Option<usize> {
        match self {
            Self::Periodic { .. } => None,
            Self::Truncated { ray } => Some(ray.len()),
        }
    }

    /// Letter `i` (0-based) of the infinite reduced word of a free-group point.
    pub fn letter(&self, i: usize) -> Result<Gen> {
        match self {
            Self::Periodic { prefix, period } => Ok(if i < prefix.len() {
                prefix[i]
            } else {
                period[(i - prefix.len()) % period.len()]
            }),
            Self::Truncated { ray } => ray
                .last()
                .and_then(|w| w.word().get(i).copied())
                .filter(|_| ray.len() == ray.last().map_or(0, |w| w.word().len()) + 1)
                .ok_or(Error::InsufficientDepth {
                    needed: i as u32 + 2,
                    have: ray.len() as u32,
                }),
        }
    }

    /// The first `n` letters.
    pub fn prefix_word(&self, n: usize) -> Result<Vec<Gen>> {
        (0..n).map(|i| self.letter(i)).collect()
    }

    /// `c(1..=depth)` of the geodesic ray from `1_G` (the prefixes of the
    /// word in a free group).
    pub fn ray(&self, depth: usize) -> Result<Segment> {
        match self {
            Self::Truncated { ray } => {
                if depth > ray.len() {
                    return Err(Error::InsufficientDepth {
                        needed: depth as u32,
                        have: ray.len() as u32,
                    });
                }
                Ok(Segment::new(1, ray[..depth].to_vec()))
            }
            Self::Periodic { .. } => {
                let w = self.prefix_word(depth.saturating_sub(1))?;
                Ok(Segment::new(
                    1,
                    (0..depth)
                        .map(|i| GroupElement::from_normal_form(w[..i].to_vec()))
                        .collect(),
                ))
            }
        }
    }

    pub fn format(&self, alpha: &GeneratorAlphabet) -> String {
        match self {
            Self::Periodic { prefix, period } => {
                let mut s = alpha.format(prefix);
                if period.len() == 1 {
                    let _ = write!(s, "{}^∞", alpha.format(period));
                } else {
                    let _ = write!(s, "({})^∞", alpha.format(period));
                }
                s
            }
            Self::Truncated { ray } => {
                let last = ray
                    .last()
                    .map(|g| alpha.format(g.word()))
                    .unwrap_or_default();
                format!("{last}… (depth {})", ray.len())
            }
        }
    }
}

/// The boundary action `g x`.
///
/// Free groups with periodic points are exact. A truncated free-group point
/// loses up to `|g|` letters to cancellation. In ball mode the translated ray
/// is replaced by the ShortLex geodesic from `1_G` to `g c(depth)`, kept up to
/// depth `depth - |g|`.
pub fn act(g: &GroupElement, x: &BoundaryPoint, ctx: &GroupContext) -> Result<BoundaryPoint> {
    let alpha = ctx.alphabet();
    match x {
        BoundaryPoint::Periodic { prefix, period } => {
            let mut w = g.word().to_vec();
            w.extend_from_slice(prefix);
            let mut r = period.clone();
            Ok(BoundaryPoint::settle(alpha, alpha.free_reduce(&w), &mut r))
        }
        BoundaryPoint::Truncated { ray } => {
            let depth = ray.len();
            let glen = g.len() as usize;
            if depth <= glen {
                return Err(Error::InsufficientDepth {
                    needed: glen as u32 + 1,
                    have: depth as u32,
                });
            }
            let last = ray.last().expect("non-empty ray");
            if ctx.is_free() {
                // At most |g| letters cancel, and the cancellation is decided
                // by the first |g| letters, which are known.
                let w = ctx.multiply(g, last)?;
                Ok(BoundaryPoint::from_prefix(w.word()))
            } else {
                let end = ctx.multiply(g, last)?;
                let geo = ctx.enumerate_geodesics(&GroupElement::identity(), &end, 1)?;
                let path = &geo.paths[0].values;
                let keep = (depth - glen).min(path.len());
                Ok(BoundaryPoint::Truncated {
                    ray: path[..keep].to_vec(),
                })
            }
        }
    }
}

/// On-disk form: `{"prefix": "aab", "period": "ab"}` or
/// `{"ray": ["", "a", ...], "depth": d}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum BoundaryPointFile {
    Periodic { prefix: String, period: String },
    Truncated { ray: Vec<String>, depth: usize },
}

impl BoundaryPointFile {
    pub fn from_point(x: &BoundaryPoint, alpha: &GeneratorAlphabet) -> Self {
        match x {
            BoundaryPoint::Periodic { prefix, period } => Self::Periodic {
                prefix: alpha.format(prefix),
                period: alpha.format(period),
            },
            BoundaryPoint::Truncated { ray } => Self::Truncated {
                ray: ray.iter().map(|g| alpha.format(g.word())).collect(),
                depth: ray.len(),
            },
        }
    }

    pub fn to_point(&self, ctx: &GroupContext) -> Result<BoundaryPoint> {
        match self {
            Self::Periodic { prefix, period } => {
                if !ctx.is_free() {
                    return Err(Error::InvalidInput(
                        "periodic boundary points need a free group".into(),
                    ));
                }
                let a = ctx.alphabet();
                BoundaryPoint::periodic(a, &a.parse(prefix)?, &a.parse(period)?)
            }
            Self::Truncated { ray, depth } => {
                if *depth != ray.len() {
                    return Err(Error::InvalidInput(format!(
                        "ray has {} points but depth {depth}",
                        ray.len()
                    )));
                }
                let ray = ray
                    .iter()
                    .map(|w| ctx.parse(w))
                    .collect::<Result<Vec<_>>>()?;
                BoundaryPoint::truncated(ray, ctx)
            }
        }
    }
}
