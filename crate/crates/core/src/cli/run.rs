//! Run configuration and the end-to-end shadowing pipeline behind
//! `bshadow shadow`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::boundary::{cover_for_l, BoundaryPoint, BoundaryPointFile, Cover, CoverKind};
use crate::error::{Error, Result};
use crate::geometry::{certify_delta, GeometryCertificate, HyperbolicityCertificate};
use crate::group::{GroupContext, GroupElement};
use crate::shadowing::{
    check_consistency, check_pseudo_orbit, default_depth, derive_constants, edges_in_ball, shadow,
    verify_shadowing, CheckOptions, ConsistencyOptions, ConsistencyReport, DeriveOptions, Noise,
    PseudoOrbit, PseudoOrbitCheck, PseudoOrbitFile, ShadowSummary, ShadowingConstants,
    VerifyReport,
};

/// A point replaced by hand, for negative controls.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Corruption {
    pub g: String,
    pub point: BoundaryPointFile,
}

/// `bshadow shadow --config` file. Paths are relative to the file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub group: PathBuf,
    /// Certificate from `bshadow certify`; computed at `delta_radius` when
    /// absent.
    #[serde(default)]
    pub certificate: Option<PathBuf>,
    #[serde(default = "default_delta_radius")]
    pub delta_radius: u32,
    /// Lebesgue level of the U-cover.
    pub l: u32,
    #[serde(default)]
    pub u_cover: Option<PathBuf>,
    pub x0: BoundaryPointFile,
    pub noise: Noise,
    #[serde(default = "one")]
    pub pseudo_orbits: usize,
    pub support_radius: u32,
    /// Construction depth; defaults to `support - L - check_radius`.
    #[serde(default)]
    pub depth: Option<usize>,
    pub check_radius: u32,
    pub seed: u64,
    #[serde(default)]
    pub corrupt: Vec<Corruption>,
    /// Load the pseudo-orbit instead of generating it (one orbit only).
    #[serde(default)]
    pub pseudo_orbit_file: Option<PathBuf>,
    #[serde(default = "one_u32")]
    pub consistency_radius: u32,
    #[serde(default = "default_lemma_samples")]
    pub lemma_samples: usize,
    #[serde(default = "default_check_samples")]
    pub check_samples: usize,
    #[serde(default)]
    pub keep_witnesses: bool,
    #[serde(default)]
    pub node_budget: Option<u64>,
}

fn default_delta_radius() -> u32 {
    4
}
fn one() -> usize {
    1
}
fn one_u32() -> u32 {
    1
}
fn default_lemma_samples() -> usize {
    10
}
fn default_check_samples() -> usize {
    500
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| {
            Error::InvalidInput(format!(
                "{}:{}:{}: {e}",
                path.display(),
                e.line(),
                e.column()
            ))
        })
    }
}

/// How an orbit's run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    /// The pseudo-orbit failed its check; nothing is claimed about it.
    InvalidInput,
    /// A check backed by a theorem failed.
    TheoremFailure,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitRun {
    pub index: usize,
    pub seed: u64,
    pub outcome: Outcome,
    pub pseudo_orbit_check: PseudoOrbitCheck,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shadow: Option<ShadowSummary>,
    /// Set for noiseless orbits: the periodic fit of the shadow equals `x0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recovers_x0: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerifyReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub consistency: Option<ConsistencyReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub seed: u64,
    pub generators: Vec<String>,
    pub relators: Vec<String>,
    pub hyperbolicity: HyperbolicityCertificate,
    pub constants: ShadowingConstants,
    pub x0: String,
    pub noise: Noise,
    pub support_radius: u32,
    pub construction_depth: usize,
    pub check_radius: u32,
    pub u_cover_level: Option<u32>,
    pub orbits: Vec<OrbitRun>,
    pub passed: usize,
    pub invalid_inputs: usize,
    pub theorem_failures: usize,
}

/// Seed of orbit `i`.
pub fn orbit_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(i as u64)
        .rotate_left(17)
        ^ seed
}

pub struct Pipeline {
    pub ctx: GroupContext,
    pub cert: HyperbolicityCertificate,
    pub constants: ShadowingConstants,
    pub u_cover: Cover,
    pub x0: BoundaryPoint,
    pub depth: usize,
}

impl Pipeline {
    pub fn prepare(cfg: &RunConfig, base: &Path) -> Result<Self> {
        let ctx = GroupContext::load(&base.join(&cfg.group))?;
        let cert = match &cfg.certificate {
            Some(p) => GeometryCertificate::load(&base.join(p))?.hyperbolicity,
            None => certify_delta(&ctx, cfg.delta_radius, 256)?,
        };
        let mut opts = DeriveOptions::for_group(&ctx, &cert);
        if let Some(b) = cfg.node_budget {
            opts.node_budget = b;
        }
        let constants = derive_constants(cfg.l, &cert, &ctx, &opts)?;
        let u_cover = match &cfg.u_cover {
            Some(p) => Cover::load(&base.join(p), &ctx)?,
            None => cover_for_l(cfg.l, CoverKind::U, &ctx, &cert)?,
        };
        let x0 = cfg.x0.to_point(&ctx)?;
        if cfg.support_radius < constants.f_radius + cfg.check_radius {
            return Err(Error::InsufficientSupport(format!(
                "support radius {} is below L + check radius = {}",
                cfg.support_radius,
                constants.f_radius + cfg.check_radius
            )));
        }
        let probe = PseudoOrbit::lazy(x0.clone(), cfg.noise, cfg.support_radius, 0);
        let depth = cfg
            .depth
            .unwrap_or_else(|| default_depth(&probe, &constants, cfg.check_radius));
        Ok(Self {
            ctx,
            cert,
            constants,
            u_cover,
            x0,
            depth,
        })
    }

    pub fn orbit(&self, cfg: &RunConfig, base: &Path, i: usize) -> Result<PseudoOrbit> {
        let seed = orbit_seed(cfg.seed, i);
        let mut po = match &cfg.pseudo_orbit_file {
            Some(p) => {
                let path = base.join(p);
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                let file: PseudoOrbitFile = serde_json::from_str(&text)?;
                file.to_orbit(&self.ctx, path.parent().unwrap_or(base))?
            }
            None => PseudoOrbit::lazy(self.x0.clone(), cfg.noise, cfg.support_radius, seed),
        };
        for c in &cfg.corrupt {
            po = po.with_override(self.ctx.parse(&c.g)?, c.point.to_point(&self.ctx)?);
        }
        Ok(po)
    }

    /// Check, shadow, verify and test consistency for one pseudo-orbit.
    pub fn run_orbit(&self, cfg: &RunConfig, po: &PseudoOrbit, index: usize) -> Result<OrbitRun> {
        let (ctx, cert, k) = (&self.ctx, &self.cert, &self.constants);
        let check = check_pseudo_orbit(
            po,
            k,
            ctx,
            cert,
            &CheckOptions {
                samples: cfg.check_samples,
                seed: po.seed,
                max_violations: 16,
            },
        )?;
        let mut run = OrbitRun {
            index,
            seed: po.seed,
            outcome: Outcome::InvalidInput,
            pseudo_orbit_check: check,
            shadow: None,
            recovers_x0: None,
            verification: None,
            consistency: None,
            error: None,
        };
        if !run.pseudo_orbit_check.ok {
            return Ok(run);
        }
        match self.theorem_checks(cfg, po, &mut run) {
            Ok(()) => {}
            Err(e) if e.is_theorem_failure() => {
                run.outcome = Outcome::TheoremFailure;
                run.error = Some(e.to_string());
            }
            Err(e) => return Err(e),
        }
        Ok(run)
    }

    fn theorem_checks(&self, cfg: &RunConfig, po: &PseudoOrbit, run: &mut OrbitRun) -> Result<()> {
        let (ctx, cert, k) = (&self.ctx, &self.cert, &self.constants);
        let out = shadow(po, k, ctx, cert, self.depth)?;
        if po.noise == Noise::None && po.overrides.is_empty() {
            run.recovers_x0 = Some(out.x_fit.as_ref() == Some(&self.x0));
        }
        let mut summary = out.summary(ctx);
        summary.profile = shadow_profile(po, &out.x, ctx)?;
        run.shadow = Some(summary);
        let v = verify_shadowing(
            po,
            &out.x,
            &self.u_cover,
            cfg.check_radius,
            ctx,
            cert,
            cfg.keep_witnesses,
        )?;
        let pairs = edges_in_ball(ctx, cfg.consistency_radius)?;
        let c = check_consistency(
            po,
            k,
            ctx,
            cert,
            &pairs,
            &ConsistencyOptions {
                depth: self.depth,
                lemma_samples: cfg.lemma_samples,
                sample_radius: cfg.check_radius,
                seed: po.seed,
            },
        )?;
        let ok = v.ok && c.ok && out.in_neighborhood && run.recovers_x0 != Some(false);
        run.verification = Some(v);
        run.consistency = Some(c);
        run.outcome = if ok {
            Outcome::Pass
        } else {
            Outcome::TheoremFailure
        };
        Ok(())
    }
}

/// `d(r(t), c_{m_1}(t))` along the shadow ray: how far the shadowing point's
/// ray is from the ray of `x_1` at each depth.
fn shadow_profile(po: &PseudoOrbit, x: &BoundaryPoint, ctx: &GroupContext) -> Result<Vec<u32>> {
    let n = x.depth().unwrap_or(0);
    let a = x.ray(n)?;
    let x1 = po.point(&GroupElement::identity(), ctx)?;
    let b = match x1.depth() {
        Some(d) => x1.ray(d.min(n))?,
        None => x1.ray(n)?,
    };
    a.values
        .iter()
        .zip(&b.values)
        .map(|(u, v)| ctx.word_metric(u, v))
        .collect()
}

pub fn run_shadow(cfg: &RunConfig, base: &Path) -> Result<RunReport> {
    let p = Pipeline::prepare(cfg, base)?;
    let n = if cfg.pseudo_orbit_file.is_some() {
        1
    } else {
        cfg.pseudo_orbits
    };
    let mut orbits = Vec::with_capacity(n);
    for i in 0..n {
        let po = p.orbit(cfg, base, i)?;
        orbits.push(p.run_orbit(cfg, &po, i)?);
    }
    let count = |o: Outcome| orbits.iter().filter(|r| r.outcome == o).count();
    let alpha = p.ctx.alphabet();
    Ok(RunReport {
        seed: cfg.seed,
        generators: alpha.symbols().to_vec(),
        relators: p.ctx.relators().iter().map(|r| alpha.format(r)).collect(),
        hyperbolicity: p.cert.clone(),
        x0: p.x0.format(alpha),
        noise: cfg.noise,
        support_radius: cfg.support_radius,
        construction_depth: p.depth,
        check_radius: cfg.check_radius,
        u_cover_level: p.u_cover.guaranteed_l,
        passed: count(Outcome::Pass),
        invalid_inputs: count(Outcome::InvalidInput),
        theorem_failures: count(Outcome::TheoremFailure),
        constants: p.constants,
        orbits,
    })
}
