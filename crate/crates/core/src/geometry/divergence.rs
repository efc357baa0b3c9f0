//! Divergence of quasi-geodesic rays: the constants `Delta_1`, `Delta_2` and
//! the trichotomy they promise, certified by exhaustive search.
//!
//! Rays are finite paths here. A parameter `t` of `c` is certified for the
//! pair `(c, c')` when no extension of `c'` beyond its last point could be
//! closer to `c(t)` than the truncated image already is:
//! `lambda * T' - epsilon - d(c'(1), c(t)) >= d(c(t), Img c')` where `T'` is
//! the number of steps of `c'`. Only the leading run of certified parameters
//! is used.

use serde::{Deserialize, Serialize};

use super::quasi::PathSearch;
use super::space::BallSpace;
use super::{HyperbolicityCertificate, MorseConstant, QuasiGeodesicParams};
use crate::error::{Error, Result};
use crate::group::{Gen, GroupContext, Segment};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivergenceConstants {
    pub delta1: u32,
    pub delta2: u32,
    #[serde(rename = "D")]
    pub d: u32,
    #[serde(rename = "C")]
    pub c: u32,
    pub delta: u32,
    #[serde(rename = "K")]
    pub k: u32,
    pub params: QuasiGeodesicParams,
    pub radius_certified: u32,
    pub method: String,
    pub pairs_checked: u64,
    pub pairs_exceeding: u64,
    /// Exceeding pairs whose window reached `t0 + delta2`.
    pub pairs_resolved: u64,
    /// No pair left `Delta_1` inside its window, so any `Delta_2` works.
    pub vacuous: bool,
    pub exact: bool,
}

impl DivergenceConstants {
    /// `Delta_1 + C + 10 delta`.
    pub fn jump_threshold(&self) -> u32 {
        self.delta1 + self.c + 10 * self.delta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trichotomy {
    /// `d(c(t), Img c') <= Delta_1` on the whole certified window.
    Asymptotic,
    /// First exceedance at `t0` and the jump holds at `t0 + Delta_2`.
    Jump { t0: u32 },
    /// First exceedance at `t0`, but `t0 + Delta_2` is past the window.
    Unresolved { t0: u32 },
    /// The jump inequality fails at `t0 + Delta_2`.
    Violated { t0: u32 },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrichotomyReport {
    pub pairs: u64,
    pub asymptotic: u64,
    pub jump: u64,
    pub unresolved: u64,
    pub violated: u64,
    pub witness: Option<(Vec<String>, Vec<String>)>,
}

/// `t -> d(c(t), Img c')` for every parameter of `c`.
pub fn divergence_profile(c: &Segment, c2: &Segment, ctx: &GroupContext) -> Result<Vec<u32>> {
    c.values
        .iter()
        .map(|v| super::distance_to_image(v, c2, ctx))
        .collect()
}

/// Certified profile of a pair: `None` from the first uncertified parameter.
fn certified_profile(
    params: &QuasiGeodesicParams,
    steps: u32,
    n: usize,
    mut v_and_d0: impl FnMut(usize) -> (u32, u32),
) -> Vec<Option<u32>> {
    let (p, q) = (*params.lambda.numer() as u64, *params.lambda.denom() as u64);
    let mut out = Vec::with_capacity(n);
    let mut open = true;
    for i in 0..n {
        if open {
            let (v, d0) = v_and_d0(i);
            // d(c(t), c'(s)) >= lambda (s - 1) - eps - d0 for s past the end
            open = q * (v as u64 + params.epsilon as u64 + d0 as u64) <= p * steps as u64;
            out.push(open.then_some(v));
        } else {
            out.push(None);
        }
    }
    out
}

fn window(profile: &[Option<u32>]) -> &[Option<u32>] {
    let end = profile
        .iter()
        .position(Option::is_none)
        .unwrap_or(profile.len());
    &profile[..end]
}

fn first_exceedance(w: &[Option<u32>], delta1: u32) -> Option<usize> {
    w.iter().position(|v| v.is_some_and(|v| v > delta1))
}

fn classify(profile: &[Option<u32>], dc: &DivergenceConstants) -> Trichotomy {
    let w = window(profile);
    let Some(i0) = first_exceedance(w, dc.delta1) else {
        return Trichotomy::Asymptotic;
    };
    let t0 = i0 as u32 + 1;
    match w.get(i0 + dc.delta2 as usize) {
        None => Trichotomy::Unresolved { t0 },
        Some(v) if v.expect("window is certified") > dc.jump_threshold() => Trichotomy::Jump { t0 },
        Some(_) => Trichotomy::Violated { t0 },
    }
}

/// Trichotomy of one explicit pair. `c` and `c'` are `(lambda, epsilon)`
/// paths with `c` parametrised from 1.
pub fn classify_pair(
    c: &Segment,
    c2: &Segment,
    dc: &DivergenceConstants,
    ctx: &GroupContext,
) -> Result<Trichotomy> {
    let start = c2
        .values
        .first()
        .ok_or_else(|| Error::InvalidInput("empty ray".into()))?;
    let steps = c2.length() as u32;
    let mut err = None;
    let profile = certified_profile(&dc.params, steps, c.values.len(), |i| {
        let v = super::distance_to_image(&c.values[i], c2, ctx);
        let d0 = ctx.word_metric(start, &c.values[i]);
        match (v, d0) {
            (Ok(v), Ok(d0)) => (v, d0),
            (Err(e), _) | (_, Err(e)) => {
                err.get_or_insert(e);
                (u32::MAX, u32::MAX)
            }
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(classify(&profile, dc))
}

type Witness<'w> = &'w dyn Fn() -> (Vec<String>, Vec<String>);

struct ScanInfo {
    pairs: u64,
    exact: bool,
    method: &'static str,
}

fn tree_mode(ctx: &GroupContext, params: &QuasiGeodesicParams) -> bool {
    ctx.is_free() && params.lambda == 1.into() && params.epsilon == 0
}

/// Visits the certified profile of every ray pair `(c, c')` with
/// `c(1) = 1_G` and `d(1_G, c'(1)) <= d`.
fn scan_pairs(
    ctx: &GroupContext,
    params: &QuasiGeodesicParams,
    d: u32,
    radius: u32,
    node_budget: u64,
    visit: &mut dyn FnMut(&[Option<u32>], Witness),
) -> Result<ScanInfo> {
    if tree_mode(ctx, params) {
        return tree_scan(ctx, params, d, radius, visit);
    }
    let space = BallSpace::new(ctx, radius)?;
    if d > radius {
        return Err(Error::InsufficientRadius {
            radius,
            detail: format!("start offset D = {d} exceeds the search ball"),
        });
    }
    let params = QuasiGeodesicParams { k: None, ..*params };
    let (p, q) = (
        *params.lambda.numer() as usize,
        *params.lambda.denom() as usize,
    );
    let max_len = ((2 * radius as usize + params.epsilon as usize) * q).div_ceil(p);
    let mut exact = true;
    let mut search = PathSearch::new(&space, params, max_len, node_budget);
    let rays = search.maximal_from(0);
    exact &= !search.exhausted;
    let fmt = |path: &[u32]| -> Vec<String> {
        path.iter()
            .map(|&x| ctx.alphabet().format(space.table.word(x)))
            .collect()
    };
    let mut pairs = 0u64;
    'outer: for x in 0..space.table.ball_end(d) as u32 {
        let mut search = PathSearch::new(&space, params, max_len, node_budget);
        let others = search.maximal_from(x);
        exact &= !search.exhausted;
        for c2 in &others {
            let steps = (c2.len() - 1) as u32;
            for c in &rays {
                if pairs == node_budget {
                    exact = false;
                    break 'outer;
                }
                pairs += 1;
                let profile = certified_profile(&params, steps, c.len(), |i| {
                    let v = c2
                        .iter()
                        .map(|&y| space.dist(c[i], y))
                        .min()
                        .expect("non-empty");
                    (v, space.dist(x, c[i]))
                });
                visit(&profile, &|| (fmt(c), fmt(c2)));
            }
        }
    }
    Ok(ScanInfo {
        pairs,
        exact,
        method: "exhaustive ball scan",
    })
}

/// Geodesic ray pairs in a free group, up to isometries of the tree.
///
/// The isometries fixing `1_G` act transitively on geodesics from `1_G`, so
/// `c` is a power of the first generator. Among the branches a geodesic `c'`
/// can take away from `Img c` all are exchanged by isometries fixing `c` and
/// the part of `c'` already drawn, so only the least one is followed.
fn tree_scan(
    ctx: &GroupContext,
    params: &QuasiGeodesicParams,
    d: u32,
    radius: u32,
    visit: &mut dyn FnMut(&[Option<u32>], Witness),
) -> Result<ScanInfo> {
    let alpha = ctx.alphabet();
    let a: Gen = 0;
    let n = radius as usize;
    let c: Vec<Vec<Gen>> = (0..=n).map(|i| vec![a; i]).collect();
    let steps = 2 * (radius + d);
    let dist = |u: &[Gen], v: &[Gen]| -> u32 {
        let common = u.iter().zip(v).take_while(|(x, y)| x == y).count();
        (u.len() + v.len() - 2 * common) as u32
    };
    // distance to {a^0, ..., a^n}
    let off_c =
        |w: &[Gen]| -> usize { w.len() - w.iter().take(n).take_while(|&&s| s == a).count() };
    let fmt = |p: &[Vec<Gen>]| -> Vec<String> { p.iter().map(|w| alpha.format(w)).collect() };

    let starts = ctx.ball(d)?;
    let mut pairs = 0u64;
    for x in &starts {
        let mut stack: Vec<(Vec<Vec<Gen>>, Option<Gen>)> = vec![(vec![x.word().to_vec()], None)];
        while let Some((path, back)) = stack.pop() {
            let y = path.last().expect("non-empty");
            if path.len() as u32 == steps + 1 {
                pairs += 1;
                let profile = certified_profile(params, steps, c.len(), |i| {
                    let v = path
                        .iter()
                        .map(|w| dist(&c[i], w))
                        .min()
                        .expect("non-empty");
                    (v, dist(x.word(), &c[i]))
                });
                visit(&profile, &|| (fmt(&c), fmt(&path)));
                continue;
            }
            let here = off_c(y);
            let mut away_taken = false;
            for s in alpha.gens() {
                if Some(s) == back {
                    continue;
                }
                let mut w = y.clone();
                if w.last() == Some(&alpha.inverse(s)) {
                    w.pop();
                } else {
                    w.push(s);
                }
                if off_c(&w) > here {
                    if away_taken {
                        continue;
                    }
                    away_taken = true;
                }
                let mut next = path.clone();
                next.push(w);
                stack.push((next, Some(alpha.inverse(s))));
            }
        }
    }
    Ok(ScanInfo {
        pairs,
        exact: true,
        method: "tree scan up to isometry",
    })
}

/// `Delta_1 = 2K + D + 4 delta`; `Delta_2` is the least `s` such that every
/// scanned pair whose first exceedance `t0` of `Delta_1` has `t0 + s` in its
/// window satisfies `d(c(t0 + s), Img c') > Delta_1 + C + 10 delta`.
///
/// In free groups with geodesic parameters `radius` is the length of `c`;
/// otherwise it is the search ball.
#[allow(clippy::too_many_arguments)]
pub fn divergence_constants(
    d: u32,
    c: u32,
    params: &QuasiGeodesicParams,
    cert: &HyperbolicityCertificate,
    morse: &MorseConstant,
    ctx: &GroupContext,
    radius: u32,
    node_budget: u64,
) -> Result<DivergenceConstants> {
    let delta = cert.delta;
    let delta1 = 2 * morse.k + d + 4 * delta;
    let thr = delta1 + c + 10 * delta;
    // per s: some checked pair fails / how many pairs were checked
    let mut failed: Vec<Option<(Vec<String>, Vec<String>)>> = Vec::new();
    let mut checked: Vec<u64> = Vec::new();
    let mut exceeding = 0u64;
    let base = DivergenceConstants {
        delta1,
        delta2: 0,
        d,
        c,
        delta,
        k: morse.k,
        params: QuasiGeodesicParams { k: None, ..*params },
        radius_certified: radius,
        method: String::new(),
        pairs_checked: 0,
        pairs_exceeding: 0,
        pairs_resolved: 0,
        vacuous: true,
        exact: cert.exact && morse.exact,
    };
    if !tree_mode(ctx, params) && delta1 >= 2 * radius {
        // Both rays stay in B(radius), whose diameter is at most 2 radius.
        return Ok(DivergenceConstants {
            method: "diameter bound".into(),
            ..base
        });
    }
    let info = scan_pairs(
        ctx,
        params,
        d,
        radius,
        node_budget,
        &mut |profile, witness| {
            let w = window(profile);
            let Some(i0) = first_exceedance(w, delta1) else {
                return;
            };
            exceeding += 1;
            let room = w.len() - i0;
            if failed.len() < room {
                failed.resize(room, None);
                checked.resize(room, 0);
            }
            for s in 0..room {
                checked[s] += 1;
                if w[i0 + s].expect("window is certified") <= thr && failed[s].is_none() {
                    failed[s] = Some(witness());
                }
            }
        },
    )?;
    let mut out = DivergenceConstants {
        method: info.method.into(),
        pairs_checked: info.pairs,
        pairs_exceeding: exceeding,
        vacuous: exceeding == 0,
        exact: base.exact && info.exact,
        ..base
    };
    if exceeding == 0 {
        return Ok(out);
    }
    match (0..failed.len()).find(|&s| failed[s].is_none()) {
        Some(s) => {
            out.delta2 = s as u32;
            out.pairs_resolved = checked[s];
            Ok(out)
        }
        None => {
            let (wc, wc2) = failed
                .last()
                .cloned()
                .flatten()
                .expect("some s was checked");
            Err(Error::InsufficientRadius {
                radius,
                detail: format!(
                    "no Delta_2 certified: c = [{}], c' = [{}] stays within {thr} up to the window end",
                    wc.join(", "),
                    wc2.join(", ")
                ),
            })
        }
    }
}

/// Re-scans the pairs behind `dc` and classifies each one.
pub fn check_trichotomy(
    dc: &DivergenceConstants,
    ctx: &GroupContext,
    node_budget: u64,
) -> Result<TrichotomyReport> {
    let mut rep = TrichotomyReport::default();
    scan_pairs(
        ctx,
        &dc.params,
        dc.d,
        dc.radius_certified,
        node_budget,
        &mut |profile, witness| {
            rep.pairs += 1;
            match classify(profile, dc) {
                Trichotomy::Asymptotic => rep.asymptotic += 1,
                Trichotomy::Jump { .. } => rep.jump += 1,
                Trichotomy::Unresolved { .. } => rep.unresolved += 1,
                Trichotomy::Violated { .. } => {
                    rep.violated += 1;
                    if rep.witness.is_none() {
                        rep.witness = Some(witness());
                    }
                }
            }
        },
    )?;
    Ok(rep)
}
