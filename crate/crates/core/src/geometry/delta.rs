//! Thin-triangle certification.
//!
//! Triangles are scanned with one vertex at `1_G` and the other two in
//! `B(r)`. By left-invariance this covers every geodesic triangle having two
//! sides of length at most `r` that meet at a common vertex, in particular
//! every triangle with vertices in `B(r/2)`. All geodesic choices for all
//! three sides are considered (up to the multiplicity cap).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::ball::NONE;
use crate::group::{bfs_row, label_symmetries, BallTable, GroupContext};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperbolicityCertificate {
    pub delta: u32,
    pub radius_certified: u32,
    pub method: String,
    /// False when a cap or the table radius limited the scan; `delta` is then
    /// only a lower bound.
    pub exact: bool,
    pub triangles_checked: u64,
    /// A triangle `(1, y, z)` attaining `delta`, as normal-form words.
    pub witness: Option<(String, String)>,
}

/// Per-source BFS distances inside the ball table. Rows are built on demand.
pub(crate) struct BallDistances<'a> {
    table: &'a BallTable,
    rows: Vec<Option<Vec<u8>>>,
}

impl<'a> BallDistances<'a> {
    pub(crate) fn new(table: &'a BallTable, sources: usize) -> Self {
        Self {
            table,
            rows: vec![None; sources],
        }
    }

    pub(crate) fn row(&mut self, src: u32) -> &[u8] {
        let t = self.table;
        self.rows[src as usize].get_or_insert_with(|| bfs_row(t, src))
    }

    pub(crate) fn dist(&mut self, src: u32, other: u32) -> u32 {
        self.row(src)[other as usize] as u32
    }
}

/// All geodesics from `from` to `to` that descend the distance row `row`
/// (distances to `to`), as index paths. Capped; sets `*capped` on overflow.
pub(crate) fn descend_paths(
    table: &BallTable,
    row: &[u8],
    from: u32,
    cap: usize,
    capped: &mut bool,
) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let n = descend_paths_into(table, row, from, cap, capped, &mut out);
    out.truncate(n);
    out
}

/// As `descend_paths`, reusing the buffers in `out`. Only the first `n`
/// entries (the return value) are meaningful afterwards.
fn descend_paths_into(
    table: &BallTable,
    row: &[u8],
    from: u32,
    cap: usize,
    capped: &mut bool,
    out: &mut Vec<Vec<u32>>,
) -> usize {
    let mut n = 0;
    let mut stack = Vec::with_capacity(row[from as usize] as usize + 1);
    stack.push(from);
    #[allow(clippy::too_many_arguments)]
    fn go(
        table: &BallTable,
        row: &[u8],
        stack: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
        n: &mut usize,
        cap: usize,
        capped: &mut bool,
    ) {
        let cur = *stack.last().expect("non-empty");
        let d = row[cur as usize];
        if d == 0 {
            if *n == cap {
                *capped = true;
            } else {
                if *n == out.len() {
                    out.push(Vec::new());
                }
                out[*n].clear();
                out[*n].extend_from_slice(stack);
                *n += 1;
            }
            return;
        }
        for s in 0..table.ngen() as u8 {
            let y = table.mul(cur, s);
            if y != NONE && row[y as usize] == d - 1 {
                stack.push(y);
                go(table, row, stack, out, n, cap, capped);
                stack.pop();
                if *capped {
                    return;
                }
            }
        }
    }
    go(table, row, &mut stack, out, &mut n, cap, capped);
    n
}

/// Geodesics from `1_G` to `y` through table predecessors.
fn geodesics_from_identity(
    table: &BallTable,
    y: u32,
    cap: usize,
    capped: &mut bool,
) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut stack = vec![y];
    fn go(
        table: &BallTable,
        stack: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
        cap: usize,
        capped: &mut bool,
    ) {
        let cur = *stack.last().expect("non-empty");
        let d = table.depth(cur);
        if d == 0 {
            if out.len() == cap {
                *capped = true;
            } else {
                let mut p = stack.clone();
                p.reverse();
                out.push(p);
            }
            return;
        }
        for s in 0..table.ngen() as u8 {
            let x = table.mul(cur, s);
            if x != NONE && table.depth(x) == d - 1 {
                stack.push(x);
                go(table, stack, out, cap, capped);
                stack.pop();
                if *capped {
                    return;
                }
            }
        }
    }
    go(table, &mut stack, &mut out, cap, capped);
    out
}

struct Side<'a> {
    paths: &'a [Vec<u32>],
}

/// Thinness of one triangle given all geodesic choices of its three sides.
struct TriangleScan<'s, 'a> {
    sides: [Side<'s>; 3],
    dist: &'s mut BallDistances<'a>,
    small: usize,
}

impl TriangleScan<'_, '_> {
    fn d(&mut self, p: u32, q: u32) -> u32 {
        if p == q {
            return 0;
        }
        if (p as usize) < self.small {
            self.dist.dist(p, q)
        } else {
            self.dist.dist(q, p)
        }
    }

    /// max over paths σ of side `y` of min over q in σ of d(p, q).
    fn side_distance(&mut self, p: u32, y: usize, bound: u32) -> u32 {
        let mut worst = 0;
        let npaths = self.sides[y].paths.len();
        for k in 0..npaths {
            let len = self.sides[y].paths[k].len();
            let mut best = u32::MAX;
            for j in 0..len {
                let q = self.sides[y].paths[k][j];
                let dd = self.d(p, q);
                best = best.min(dd);
                if best == 0 {
                    break;
                }
            }
            worst = worst.max(best);
            if worst > bound {
                return worst;
            }
        }
        worst
    }

    fn quick_zero(&self, p: u32, y: usize, pos: usize) -> bool {
        self.sides[y]
            .paths
            .iter()
            .all(|sigma| sigma.get(pos).is_some_and(|&q| q == p))
    }

    /// Thinness of the triangle, but only computed exactly when above `floor`.
    fn thinness(
        &mut self,
        floor: u32,
        zero_pos: &dyn Fn(usize, usize, usize) -> Option<usize>,
    ) -> u32 {
        let mut worst = 0;
        for x in 0..3 {
            let (y1, y2) = match x {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let npaths = self.sides[x].paths.len();
            for k in 0..npaths {
                let len = self.sides[x].paths[k].len();
                for i in 0..len {
                    let p = self.sides[x].paths[k][i];
                    if floor == 0 {
                        let z1 = zero_pos(x, i, y1).is_some_and(|pos| self.quick_zero(p, y1, pos));
                        let z2 = zero_pos(x, i, y2).is_some_and(|pos| self.quick_zero(p, y2, pos));
                        if z1 || z2 {
                            continue;
                        }
                    }
                    let cur = floor.max(worst);
                    if self.side_distance(p, y1, cur) <= cur
                        || self.side_distance(p, y2, cur) <= cur
                    {
                        continue;
                    }
                    let a = self.side_distance(p, y1, u32::MAX);
                    let b = self.side_distance(p, y2, a);
                    worst = worst.max(a.min(b));
                }
            }
        }
        worst
    }
}

/// Minimal `delta` making every scanned triangle `delta`-thin.
pub fn certify_delta(
    ctx: &GroupContext,
    radius: u32,
    cap: usize,
) -> Result<HyperbolicityCertificate> {
    // Free groups: geodesics between points of B(r) stay inside B(r).
    // Otherwise the third side needs B(2r).
    let table_radius = match ctx.r_max() {
        None => radius,
        Some(r_max) => {
            if 2 * radius > r_max {
                return Err(Error::OutOfCertifiedBall {
                    word: format!("<triangles with sides up to {radius}>"),
                    radius: r_max,
                });
            }
            r_max
        }
    };
    let table = ctx.table(table_radius)?;
    let small = table.ball_end(radius);
    let mut dist = BallDistances::new(&table, small);
    let mut capped = false;
    let from_one: Vec<Vec<Vec<u32>>> = (0..small as u32)
        .map(|y| geodesics_from_identity(&table, y, cap, &mut capped))
        .collect();

    // Orbit minima under relabelings fixing 1_G. A triangle (1, y, z) has an
    // image with its last vertex an orbit minimum, so only those z are needed.
    let syms = label_symmetries(ctx.alphabet(), ctx.relators());
    let canonical: Vec<bool> = (0..small as u32)
        .map(|x| {
            syms.iter().all(|pi| {
                let w: Vec<_> = table.word(x).iter().map(|&s| pi[s as usize]).collect();
                table.trace(0, &w).is_none_or(|img| img >= x)
            })
        })
        .collect();

    let mut delta = 0u32;
    let mut witness = None;
    let mut triangles = 0u64;
    let mut inexact = false;
    let exact_limit = table_radius - radius;
    let mut third_buf: Vec<Vec<u32>> = Vec::new();
    for z in 0..small as u32 {
        if !canonical[z as usize] {
            continue;
        }
        let row_z: Vec<u8> = dist.row(z).to_vec();
        let lz = table.depth(z) as usize;
        for y in 0..small as u32 {
            if y == z || (y > z && canonical[y as usize]) {
                continue;
            }
            triangles += 1;
            if y == 0 {
                continue;
            }
            let ly = table.depth(y) as usize;
            let n3 = descend_paths_into(&table, &row_z, y, cap, &mut capped, &mut third_buf);
            let third = &third_buf[..n3];
            let lc = third.first().map_or(0, |p| p.len() - 1);
            // Known coordinates: side 0 = [1,y], side 1 = [1,z], side 2 = [y,z].
            // A point at position i on side x sits at a known distance from
            // the endpoints shared with the other sides; the only position on
            // side y where it can coincide with a vertex follows from that.
            let zero_pos = move |x: usize, i: usize, y2: usize| -> Option<usize> {
                match (x, y2) {
                    (0, 1) | (1, 0) => Some(i),
                    (0, 2) => Some(ly - i),
                    (1, 2) => lc.checked_sub(lz - i),
                    (2, 0) => ly.checked_sub(i),
                    (2, 1) => lz.checked_sub(lc - i),
                    _ => None,
                }
            };
            let mut scan = TriangleScan {
                sides: [
                    Side {
                        paths: &from_one[y as usize],
                    },
                    Side {
                        paths: &from_one[z as usize],
                    },
                    Side { paths: third },
                ],
                dist: &mut dist,
                small,
            };
            let t = scan.thinness(delta, &zero_pos);
            if t > delta {
                delta = t;
                witness = Some((
                    ctx.alphabet().format(table.word(y)),
                    ctx.alphabet().format(table.word(z)),
                ));
                if ctx.r_max().is_some() && t > exact_limit {
                    inexact = true;
                }
            }
        }
    }
    Ok(HyperbolicityCertificate {
        delta,
        radius_certified: radius,
        method: "exhaustive-thin-triangles, relabeling orbits".into(),
        exact: !capped && !inexact,
        triangles_checked: triangles,
        witness,
    })
}
