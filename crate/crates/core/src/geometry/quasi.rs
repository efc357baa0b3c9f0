//! Quasi-geodesics: the defining inequality, exhaustive enumeration inside a
//! ball, discovered local-to-global constants and Morse constants.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::space::BallSpace;
use super::HyperbolicityCertificate;
use crate::error::{Error, Result};
use crate::group::{Gen, GroupContext, Segment};

pub type Lambda = Ratio<u32>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasiGeodesicParams {
    pub lambda: Lambda,
    pub epsilon: u32,
    /// Local window; `None` means the inequality is global.
    pub k: Option<u32>,
}

impl QuasiGeodesicParams {
    pub fn new(lambda: Lambda, epsilon: u32, k: Option<u32>) -> Result<Self> {
        if *lambda.numer() == 0 || lambda > Lambda::from_integer(1) {
            return Err(Error::InvalidInput(format!(
                "lambda = {lambda} is not in (0, 1]"
            )));
        }
        Ok(Self { lambda, epsilon, k })
    }

    pub fn geodesic() -> Self {
        Self::global(1, 0)
    }

    /// `(1, epsilon)` without a window.
    pub fn global(lambda_int: u32, epsilon: u32) -> Self {
        Self {
            lambda: Lambda::from_integer(lambda_int),
            epsilon,
            k: None,
        }
    }

    pub fn with_window(self, k: u32) -> Self {
        Self { k: Some(k), ..self }
    }

    /// Lower bound `lambda * gap - epsilon <= d`, in exact arithmetic.
    #[inline]
    pub fn lower_ok(&self, gap: u32, d: u32) -> bool {
        let (p, q) = (*self.lambda.numer() as u64, *self.lambda.denom() as u64);
        p * gap as u64 <= q * (d as u64 + self.epsilon as u64)
    }

    #[inline]
    pub fn pair_ok(&self, gap: u32, d: u32) -> bool {
        d <= gap && self.lower_ok(gap, d)
    }

    fn in_window(&self, gap: u32) -> bool {
        self.k.is_none_or(|k| gap <= k)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasiGeodesicCheck {
    pub ok: bool,
    /// First violating parameter pair `(s, t)` in lexicographic order.
    pub violation: Option<(i64, i64)>,
}

/// Checks the quasi-geodesic inequality for all index pairs (all pairs at
/// most `k` apart when a window is set).
pub fn is_quasi_geodesic(
    path: &Segment,
    params: &QuasiGeodesicParams,
    ctx: &GroupContext,
) -> Result<QuasiGeodesicCheck> {
    let n = path.values.len();
    for i in 0..n {
        for j in i + 1..n {
            let gap = (j - i) as u32;
            if !params.in_window(gap) {
                break;
            }
            let d = ctx.word_metric(&path.values[i], &path.values[j])?;
            if !params.pair_ok(gap, d) {
                return Ok(QuasiGeodesicCheck {
                    ok: false,
                    violation: Some((path.start + i as i64, path.start + j as i64)),
                });
            }
        }
    }
    Ok(QuasiGeodesicCheck {
        ok: true,
        violation: None,
    })
}

/// Deterministic depth-first enumeration of quasi-geodesic index paths from
/// `1_G` inside a ball. The visitor sees every path (every prefix of an
/// accepted path is itself accepted and visited first).
pub(crate) struct PathSearch<'a> {
    pub space: &'a BallSpace,
    pub params: QuasiGeodesicParams,
    pub max_len: usize,
    pub node_budget: u64,
    pub nodes: u64,
    pub exhausted: bool,
}

impl<'a> PathSearch<'a> {
    pub fn new(
        space: &'a BallSpace,
        params: QuasiGeodesicParams,
        max_len: usize,
        node_budget: u64,
    ) -> Self {
        Self {
            space,
            params,
            max_len,
            node_budget,
            nodes: 0,
            exhausted: false,
        }
    }

    pub fn run(&mut self, visit: &mut dyn FnMut(&[u32])) {
        self.run_from(0, visit);
    }

    pub fn run_from(&mut self, start: u32, visit: &mut dyn FnMut(&[u32])) {
        let mut path = vec![start];
        self.go(&mut path, visit);
    }

    /// Paths that admit no accepted extension (or hit `max_len`), in DFS
    /// order.
    pub fn maximal_from(&mut self, start: u32) -> Vec<Vec<u32>> {
        let mut all: Vec<Vec<u32>> = Vec::new();
        self.run_from(start, &mut |p| all.push(p.to_vec()));
        let mut out = Vec::new();
        for i in 0..all.len() {
            let extended = all.get(i + 1).is_some_and(|n| n.len() > all[i].len());
            if !extended {
                out.push(std::mem::take(&mut all[i]));
            }
        }
        out
    }

    fn go(&mut self, path: &mut Vec<u32>, visit: &mut dyn FnMut(&[u32])) {
        self.nodes += 1;
        if self.nodes > self.node_budget {
            self.exhausted = true;
            return;
        }
        visit(path);
        if path.len() > self.max_len {
            return;
        }
        let last = *path.last().expect("non-empty");
        for s in 0..self.space.ngen() as Gen {
            let Some(next) = self.space.step(last, s) else {
                continue;
            };
            let t = path.len();
            let ok = (0..t).rev().all(|i| {
                let gap = (t - i) as u32;
                !self.params.in_window(gap)
                    || self.params.pair_ok(gap, self.space.dist(path[i], next))
            });
            if ok {
                path.push(next);
                self.go(path, visit);
                path.pop();
                if self.exhausted {
                    return;
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalToGlobal {
    pub local: QuasiGeodesicParams,
    pub global: QuasiGeodesicParams,
    pub radius_certified: u32,
    pub paths_checked: u64,
    /// False when the node budget cut the enumeration short.
    pub exact: bool,
}

/// Discovers global constants for `k`-local quasi-geodesics in `B(radius)`.
///
/// Keeps `lambda' = lambda` and returns the smallest `epsilon'` making every
/// enumerated path a global `(lambda, epsilon')`-quasi-geodesic.
pub fn local_to_global(
    local: &QuasiGeodesicParams,
    cert: &HyperbolicityCertificate,
    ctx: &GroupContext,
    radius: u32,
    node_budget: u64,
) -> Result<LocalToGlobal> {
    let k = local
        .k
        .ok_or_else(|| Error::InvalidInput("local_to_global needs a window k".into()))?;
    if k <= 8 * cert.delta {
        return Err(Error::NoValidWindow {
            k,
            bound: 8 * cert.delta,
        });
    }
    let space = BallSpace::new(ctx, radius)?;
    let (p, q) = (*local.lambda.numer() as u64, *local.lambda.denom() as u64);
    let mut eps = local.epsilon as u64;
    let mut count = 0u64;
    // A path inside B(r) whose every window is controlled is short; the cap
    // only guards the enumeration when windows are small.
    let max_len = (2 * radius + k + local.epsilon) as usize;
    let mut search = PathSearch::new(&space, *local, max_len, node_budget);
    search.run(&mut |path| {
        count += 1;
        let t = path.len() - 1;
        let last = path[t];
        for (i, &x) in path[..t].iter().enumerate() {
            let gap = (t - i) as u64;
            let d = space.dist(x, last) as u64;
            // smallest e with p*gap <= q*(d + e)
            let need = (p * gap).div_ceil(q).saturating_sub(d);
            eps = eps.max(need);
        }
    });
    Ok(LocalToGlobal {
        local: *local,
        global: QuasiGeodesicParams {
            lambda: local.lambda,
            epsilon: eps as u32,
            k: None,
        },
        radius_certified: radius,
        paths_checked: count,
        exact: !search.exhausted,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorseConstant {
    #[serde(rename = "K")]
    pub k: u32,
    pub params: QuasiGeodesicParams,
    pub radius_certified: u32,
    pub paths_checked: u64,
    pub exact: bool,
    /// A path attaining `K`, as normal-form words.
    pub witness: Option<Vec<String>>,
}

/// Largest Hausdorff distance between an enumerated quasi-geodesic and any
/// geodesic with the same endpoints.
pub fn certify_morse(
    params: &QuasiGeodesicParams,
    ctx: &GroupContext,
    radius: u32,
    node_budget: u64,
    geodesic_cap: usize,
) -> Result<MorseConstant> {
    let space = BallSpace::new(ctx, radius)?;
    let params = QuasiGeodesicParams { k: None, ..*params };
    let (p, q) = (
        *params.lambda.numer() as usize,
        *params.lambda.denom() as usize,
    );
    // lambda * len - eps <= d(1, end) <= radius bounds the length.
    let max_len = ((radius as usize + params.epsilon as usize) * q).div_ceil(p);
    let mut best = 0u32;
    let mut witness: Option<Vec<u32>> = None;
    let mut capped = false;
    let mut count = 0u64;
    let mut geo_cache: std::collections::HashMap<u32, Vec<Vec<u32>>> = Default::default();
    let mut search = PathSearch::new(&space, params, max_len, node_budget);
    search.run(&mut |path| {
        count += 1;
        let end = *path.last().expect("non-empty");
        let geos = geo_cache
            .entry(end)
            .or_insert_with(|| space.geodesics_from_identity(end, geodesic_cap, &mut capped));
        for g in geos.iter() {
            let h = space.hausdorff(path, g);
            if h > best {
                best = h;
                witness = Some(path.to_vec());
            }
        }
    });
    Ok(MorseConstant {
        k: best,
        params,
        radius_certified: radius,
        paths_checked: count,
        exact: !search.exhausted && !capped,
        witness: witness.map(|w| {
            w.iter()
                .map(|&x| ctx.alphabet().format(space.table.word(x)))
                .collect()
        }),
    })
}
