mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::configs;

fn bshadow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bshadow"))
        .args(args)
        .env("BSHADOW_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn certify_free_group() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f2.json");
    let o = bshadow(&[
        "certify",
        "--group",
        p(&configs().join("groups/f2.json")),
        "--radius",
        "6",
        "--out",
        p(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["delta"], 0);
    assert_eq!(v["delta_by_radius"], serde_json::json!([0, 0, 0, 0, 0, 0]));
}

#[test]
fn certify_flat_plane_flags_growing_delta() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("z2.json");
    let o = bshadow(&[
        "certify",
        "--group",
        p(&configs().join("groups/z2.json")),
        "--radius",
        "6",
        "--out",
        p(&out),
    ]);
    // the thin-triangle scan hits the geodesic cap, so this is a partial certificate
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stdout).contains("not stabilised"));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let d: Vec<u64> = v["delta_by_radius"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_u64().unwrap())
        .collect();
    assert_eq!(d.len(), 6);
    assert!(d.windows(2).all(|w| w[0] < w[1]), "{d:?}");
}

#[test]
fn missing_or_malformed_input_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = bshadow(&[
        "certify",
        "--group",
        p(&dir.path().join("nope.json")),
        "--radius",
        "2",
        "--out",
        p(&dir.path().join("x.json")),
    ]);
    assert_eq!(code(&o), 1);

    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, "{\n  \"group\": \"g.json\",\n  \"l\": five\n}\n").unwrap();
    let o = bshadow(&[
        "shadow",
        "--config",
        p(&cfg),
        "--out",
        p(&dir.path().join("r.json")),
    ]);
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.json:3:"), "{err}");

    let o = bshadow(&["frobnicate"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn demo_recovers_the_fixed_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("demo.json");
    let o = bshadow(&[
        "shadow",
        "--config",
        p(&configs().join("f2_demo.json")),
        "--out",
        p(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let orbit = &v["orbits"][0];
    assert_eq!(orbit["outcome"], "pass");
    assert_eq!(orbit["shadow"]["x"], "a^∞");
    assert_eq!(orbit["recovers_x0"], true);
}

#[test]
fn corrupted_orbit_is_invalid_input() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bad.json");
    let o = bshadow(&[
        "shadow",
        "--config",
        p(&configs().join("f2_corrupt.json")),
        "--out",
        p(&out),
    ]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let orbit = &v["orbits"][0];
    assert_eq!(orbit["outcome"], "invalid-input");
    assert!(!orbit["pseudo_orbit_check"]["violations"]
        .as_array()
        .unwrap()
        .is_empty());
    assert!(!out.with_extension("json.witness.json").exists());
}

#[test]
fn forged_cover_sets_off_the_bug_detector() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("cover.json"),
        r#"{"kind": "U", "elements": [{"center": {"prefix": "", "period": "a"}, "l": 5}]}"#,
    )
    .unwrap();
    let cfg = serde_json::json!({
        "group": p(&configs().join("groups/f2.json")),
        "u_cover": "cover.json",
        "l": 5,
        "x0": {"prefix": "", "period": "a"},
        "noise": {"kind": "none"},
        "support_radius": 56,
        "check_radius": 2,
        "seed": 3
    });
    std::fs::write(dir.path().join("run.json"), cfg.to_string()).unwrap();
    let out = dir.path().join("report.json");
    let o = bshadow(&[
        "shadow",
        "--config",
        p(&dir.path().join("run.json")),
        "--out",
        p(&out),
    ]);
    assert_eq!(code(&o), 3);
    let w: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("report.json.witness.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(w[0]["outcome"], "theorem-failure");
    assert!(!w[0]["verification"]["failures"]
        .as_array()
        .unwrap()
        .is_empty());
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("f2_noisy.json");
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for out in [&a, &b] {
        let o = bshadow(&[
            "shadow",
            "--config",
            p(&cfg),
            "--seed",
            "7",
            "--out",
            p(out),
        ]);
        assert_eq!(code(&o), 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let o = bshadow(&["shadow", "--config", p(&cfg), "--seed", "8", "--out", p(&b)]);
    assert_eq!(code(&o), 0);
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn plotdata_tables() {
    let dir = tempfile::tempdir().unwrap();
    let reports = dir.path().join("reports");
    std::fs::create_dir(&reports).unwrap();
    let o = bshadow(&[
        "plotdata",
        "--reports",
        p(&reports),
        "--out",
        p(&dir.path().join("csv")),
    ]);
    assert_eq!(code(&o), 1);
    let o = bshadow(&[
        "plotdata",
        "--reports",
        p(&dir.path().join("absent")),
        "--out",
        p(&dir.path().join("csv")),
    ]);
    assert_eq!(code(&o), 1);

    let o = bshadow(&[
        "certify",
        "--group",
        p(&configs().join("groups/f2.json")),
        "--radius",
        "4",
        "--out",
        p(&reports.join("cert.json")),
    ]);
    assert_eq!(code(&o), 0);
    let o = bshadow(&[
        "shadow",
        "--config",
        p(&configs().join("f2_demo.json")),
        "--out",
        p(&reports.join("run.json")),
    ]);
    assert_eq!(code(&o), 0);
    let csv = dir.path().join("csv");
    let o = bshadow(&["plotdata", "--reports", p(&reports), "--out", p(&csv)]);
    assert_eq!(code(&o), 0);

    let delta = std::fs::read_to_string(csv.join("delta_vs_radius.csv")).unwrap();
    let mut lines = delta.lines();
    assert_eq!(lines.next(), Some("source,radius,delta"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.ends_with(",0")));

    let div = std::fs::read_to_string(csv.join("divergence_profiles.csv")).unwrap();
    assert!(div.starts_with("source,orbit,g,h,t,distance\n"));
    let shadow = std::fs::read_to_string(csv.join("shadow_depth.csv")).unwrap();
    assert!(shadow.starts_with("source,orbit,t,distance\n"));
    assert!(shadow.lines().count() > 1);
}
