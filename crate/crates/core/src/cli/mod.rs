//! Command-line front end: `certify`, `shadow` and `plotdata`.
//!
//! Exit codes: 0 success, 1 invalid or missing input, 2 certification cut
//! short by a search budget, 3 a theorem-backed check failed (a witness file
//! is written next to the report).

mod run;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub use run::{
    orbit_seed, run_shadow, Corruption, OrbitRun, Outcome, Pipeline, RunConfig, RunReport,
};

use crate::error::{Error, Result};
use crate::geometry::{certify_group, GeometryCertificate, SearchBudget};
use crate::group::GroupContext;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_PARTIAL: i32 = 2;
pub const EXIT_THEOREM: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "bshadow",
    version,
    about = "Shadowing on the boundary of hyperbolic groups, checked on Cayley balls"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certify delta, the geodesic Morse constant and divergence constants.
    Certify {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        radius: u32,
        /// Divergence constants for this C (omitted when absent).
        #[arg(long = "divergence-c")]
        divergence_c: Option<u32>,
        #[arg(long = "divergence-radius")]
        divergence_radius: Option<u32>,
        /// Node budget per search.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the shadowing pipeline described by a config file.
    Shadow {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's group file.
        #[arg(long)]
        group: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the config's check radius.
        #[arg(long)]
        radius: Option<u32>,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// CSV tables from certificates and run reports in a directory.
    Plotdata {
        #[arg(long)]
        reports: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Parses `args`, runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    configure_threads();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_theorem_failure() {
                EXIT_THEOREM
            } else {
                EXIT_INPUT
            }
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("BSHADOW_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Certify {
            group,
            radius,
            divergence_c,
            divergence_radius,
            budget,
            out,
        } => cmd_certify(
            &group,
            radius,
            divergence_c,
            divergence_radius,
            budget,
            &out,
        ),
        Command::Shadow {
            config,
            group,
            seed,
            radius,
            depth,
            budget,
            out,
        } => {
            let mut cfg = RunConfig::load(&config)?;
            if let Some(g) = group {
                cfg.group = std::path::absolute(g)?;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(r) = radius {
                cfg.check_radius = r;
            }
            if depth.is_some() {
                cfg.depth = depth;
            }
            if budget.is_some() {
                cfg.node_budget = budget;
            }
            cmd_shadow(&cfg, config.parent().unwrap_or(Path::new(".")), &out)
        }
        Command::Plotdata { reports, out } => cmd_plotdata(&reports, &out),
    }
}

pub fn cmd_certify(
    group: &Path,
    radius: u32,
    divergence_c: Option<u32>,
    divergence_radius: Option<u32>,
    budget: Option<u64>,
    out: &Path,
) -> Result<i32> {
    let ctx = GroupContext::load(group)?;
    let mut b = SearchBudget::default();
    if let Some(n) = budget {
        b.node_budget = n;
    }
    let cert = certify_group(
        &ctx,
        radius,
        divergence_c,
        divergence_radius.unwrap_or(radius),
        b,
    )?;
    cert.save(out)?;
    println!(
        "delta = {} at radius {} (by radius: {:?}), K = {}",
        cert.delta, cert.radius, cert.delta_by_radius, cert.morse.k
    );
    if !cert.delta_stabilized() {
        println!("note: delta has not stabilised over the certified radii");
    }
    Ok(if cert.is_complete() {
        EXIT_OK
    } else {
        EXIT_PARTIAL
    })
}

/// Writes the report (pretty JSON, newline-terminated) and, on theorem-backed
/// failures, `<out>.witness.json` with the failing orbits.
pub fn cmd_shadow(cfg: &RunConfig, base: &Path, out: &Path) -> Result<i32> {
    let report = run_shadow(cfg, base)?;
    std::fs::write(out, serde_json::to_string_pretty(&report)? + "\n")?;
    println!(
        "{} orbits: {} pass, {} invalid input, {} theorem failures",
        report.orbits.len(),
        report.passed,
        report.invalid_inputs,
        report.theorem_failures
    );
    if report.theorem_failures > 0 {
        let failing: Vec<&OrbitRun> = report
            .orbits
            .iter()
            .filter(|o| o.outcome == Outcome::TheoremFailure)
            .collect();
        let mut path = out.as_os_str().to_owned();
        path.push(".witness.json");
        std::fs::write(
            PathBuf::from(path),
            serde_json::to_string_pretty(&failing)? + "\n",
        )?;
        return Ok(EXIT_THEOREM);
    }
    Ok(EXIT_OK)
}

pub const DELTA_HEADER: &str = "source,radius,delta";
pub const DIVERGENCE_HEADER: &str = "source,orbit,g,h,t,distance";
pub const SHADOW_HEADER: &str = "source,orbit,t,distance";

pub fn cmd_plotdata(reports: &Path, out: &Path) -> Result<i32> {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(reports)
        .map_err(|e| Error::Io(format!("{}: {e}", reports.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    entries.sort();
    let (mut delta, mut div, mut sh) = (String::new(), String::new(), String::new());
    let mut found = 0;
    for p in &entries {
        let text = std::fs::read_to_string(p)?;
        let name = p
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        if let Ok(c) = serde_json::from_str::<GeometryCertificate>(&text) {
            found += 1;
            for (i, d) in c.delta_by_radius.iter().enumerate() {
                let _ = writeln!(delta, "{name},{},{d}", i + 1);
            }
        } else if let Ok(r) = serde_json::from_str::<RunReport>(&text) {
            found += 1;
            for o in &r.orbits {
                if let Some(c) = &o.consistency {
                    for e in &c.edges {
                        for (t, d) in e.profile.iter().enumerate() {
                            let _ =
                                writeln!(div, "{name},{},{},{},{},{d}", o.index, e.g, e.h, t + 1);
                        }
                    }
                }
                if let Some(s) = &o.shadow {
                    for (t, d) in s.profile.iter().enumerate() {
                        let _ = writeln!(sh, "{name},{},{},{d}", o.index, t + 1);
                    }
                }
            }
        }
    }
    if found == 0 {
        return Err(Error::InvalidInput(format!(
            "no certificates or run reports in {}",
            reports.display()
        )));
    }
    std::fs::create_dir_all(out)?;
    for (file, header, body) in [
        ("delta_vs_radius.csv", DELTA_HEADER, delta),
        ("divergence_profiles.csv", DIVERGENCE_HEADER, div),
        ("shadow_depth.csv", SHADOW_HEADER, sh),
    ] {
        std::fs::write(out.join(file), format!("{header}\n{body}"))?;
    }
    println!("{found} inputs read, tables written to {}", out.display());
    Ok(EXIT_OK)
}
