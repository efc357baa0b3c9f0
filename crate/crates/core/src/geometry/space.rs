//! Index-level view of a certified ball used by the exhaustive searches.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::ball::NONE;
use crate::group::{BallTable, Gen, GroupContext, GroupElement, Segment};

/// `B(radius)` as table indices with an exact distance on it.
///
/// In free-exact mode the distance of two reduced words is read off their
/// common prefix. In ball mode the search radius is at most half the table
/// radius, so tracing `p^-1 q` never leaves the table.
pub struct BallSpace {
    pub table: Arc<BallTable>,
    pub radius: u32,
    free: bool,
    inverse: Vec<Gen>,
}

impl BallSpace {
    pub fn new(ctx: &GroupContext, radius: u32) -> Result<Self> {
        let table = match ctx.r_max() {
            None => ctx.table(radius)?,
            Some(r_max) => {
                if 2 * radius > r_max {
                    return Err(Error::OutOfCertifiedBall {
                        word: format!("<search ball of radius {radius}>"),
                        radius: r_max,
                    });
                }
                ctx.table(r_max)?
            }
        };
        Ok(Self {
            table,
            radius,
            free: ctx.is_free(),
            inverse: ctx
                .alphabet()
                .gens()
                .map(|s| ctx.alphabet().inverse(s))
                .collect(),
        })
    }

    /// Number of elements of `B(radius)`; they are the indices `0..size()`.
    pub fn size(&self) -> usize {
        self.table.ball_end(self.radius)
    }

    pub fn ngen(&self) -> usize {
        self.table.ngen()
    }

    pub fn depth(&self, p: u32) -> u32 {
        self.table.depth(p)
    }

    /// Neighbour `p s` if it lies in `B(radius)`.
    #[inline]
    pub fn step(&self, p: u32, s: Gen) -> Option<u32> {
        let q = self.table.mul(p, s);
        (q != NONE && self.table.depth(q) <= self.radius).then_some(q)
    }

    pub fn inverse_gen(&self, s: Gen) -> Gen {
        self.inverse[s as usize]
    }

    #[inline]
    pub fn dist(&self, p: u32, q: u32) -> u32 {
        if p == q {
            return 0;
        }
        if self.free {
            let (wp, wq) = (self.table.word(p), self.table.word(q));
            let common = wp.iter().zip(wq).take_while(|(a, b)| a == b).count();
            (wp.len() + wq.len() - 2 * common) as u32
        } else {
            self.table
                .distance(p, q)
                .expect("search radius is at most half the table radius")
        }
    }

    pub fn element(&self, p: u32) -> GroupElement {
        GroupElement::from_normal_form(self.table.word(p).to_vec())
    }

    pub fn segment(&self, path: &[u32]) -> Segment {
        Segment::new(1, path.iter().map(|&p| self.element(p)).collect())
    }

    /// All geodesics from `1_G` to `p` as index paths, ShortLex-first.
    pub fn geodesics_from_identity(&self, p: u32, cap: usize, capped: &mut bool) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let mut stack = vec![p];
        self.back(&mut stack, &mut out, cap, capped);
        out
    }

    fn back(&self, stack: &mut Vec<u32>, out: &mut Vec<Vec<u32>>, cap: usize, capped: &mut bool) {
        let cur = *stack.last().expect("non-empty");
        let d = self.depth(cur);
        if d == 0 {
            if out.len() == cap {
                *capped = true;
            } else {
                let mut path = stack.clone();
                path.reverse();
                out.push(path);
            }
            return;
        }
        for s in 0..self.ngen() as Gen {
            let x = self.table.mul(cur, s);
            if x != NONE && self.table.depth(x) == d - 1 {
                stack.push(x);
                self.back(stack, out, cap, capped);
                stack.pop();
                if *capped {
                    return;
                }
            }
        }
    }

    /// Hausdorff distance between two index paths.
    pub fn hausdorff(&self, p: &[u32], q: &[u32]) -> u32 {
        let one = |a: &[u32], b: &[u32]| {
            a.iter()
                .map(|&x| b.iter().map(|&y| self.dist(x, y)).min().unwrap_or(0))
                .max()
                .unwrap_or(0)
        };
        one(p, q).max(one(q, p))
    }
}
