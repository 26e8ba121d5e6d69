//! CLI acceptance: byte-identical reports under a fixed seed and the
//! exit-code contract (0 success, 1 violated verdict, 2 invalid input
//! or refused declaration).

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_star-orlicz"))
}

fn write_fixtures(dir: &Path) {
    fs::write(dir.join("ball1.json"), r#"{"kind":"ball","r":1.0}"#).unwrap();
    fs::write(dir.join("ball2.json"), r#"{"kind":"ball","r":2.0}"#).unwrap();
    fs::write(
        dir.join("ellipse.json"),
        r#"{"kind":"ellipsoid","semi_axes":[2.0,1.0]}"#,
    )
    .unwrap();
    fs::write(dir.join("broken.json"), r#"{"kind":"ball","r":"#).unwrap();
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

#[test]
fn criterion_11_determinism_and_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    write_fixtures(dir);

    // byte-identical reports for a fixed seed, independent of thread count
    let suite_args = [
        "verify",
        "--suite",
        "dual_minkowski",
        "--n",
        "2",
        "--seed",
        "7",
        "--trials",
        "6",
        "--out",
    ];
    let out = run(&[&suite_args[..], &["run1.json"]].concat(), dir);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let out = bin()
        .args([&suite_args[..], &["run2.json"]].concat())
        .env("STAR_ORLICZ_THREADS", "1")
        .current_dir(dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let a = fs::read(dir.join("run1.json")).unwrap();
    let b = fs::read(dir.join("run2.json")).unwrap();
    assert_eq!(a, b, "reports differ across runs");
    assert!(!a.is_empty());

    let mv_args = [
        "mixedvol",
        "--phi",
        r#"{"kind":"power","p":1}"#,
        "--K",
        "ball2.json",
        "--L",
        "ball1.json",
        "--n",
        "2",
        "--out",
    ];
    let out = run(&[&mv_args[..], &["mv1.json"]].concat(), dir);
    assert!(out.status.success());
    let out = run(&[&mv_args[..], &["mv2.json"]].concat(), dir);
    assert!(out.status.success());
    assert_eq!(
        fs::read(dir.join("mv1.json")).unwrap(),
        fs::read(dir.join("mv2.json")).unwrap()
    );

    // the mixed volume of (2B, B) under the identity weight is 8π
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("mv1.json")).unwrap()).unwrap();
    let value = report["result"]["value"].as_f64().unwrap();
    assert!(
        (value - 8.0 * std::f64::consts::PI).abs() < 1e-9,
        "value {value}"
    );
    assert_eq!(report["schema_version"].as_u64(), Some(1));

    // exit 2: declared convexity contradicted by the probe (refusal)
    let out = run(
        &[
            "verify",
            "--theorem",
            "dual_obm",
            "--phi",
            r#"{"kind":"power_sum","p":1,"sign":"decreasing","m":2}"#,
            "--declare",
            "convex",
            "--K",
            "ball1.json",
            "--L",
            "ball1.json",
            "--n",
            "2",
        ],
        dir,
    );
    assert_eq!(out.status.code(), Some(2), "refusal must exit 2");
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("probe"), "stderr: {stderr}");

    // exit 2: malformed body JSON
    let out = run(&["volume", "--K", "broken.json", "--n", "2"], dir);
    assert_eq!(out.status.code(), Some(2));

    // exit 1: a violated verdict (tolerance forced to zero on a
    // quadrature-level equality) never exits 0
    let out = run(
        &[
            "verify",
            "--theorem",
            "sl_invariance",
            "--phi",
            r#"{"kind":"power","p":1}"#,
            "--matrix",
            "[[2.0,0.3],[0.0,0.5]]",
            "--K",
            "ellipse.json",
            "--L",
            "ball1.json",
            "--n",
            "2",
            "--tol",
            "0",
        ],
        dir,
    );
    assert_eq!(out.status.code(), Some(1), "violated verdict must exit 1");

    println!("ACCEPTANCE 11 PASS: byte-identical seeded reports; exit codes 0/1/2 verified incl. refused mis-declaration");
}

#[test]
fn verify_suite_all_runs_clean() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let out = run(
        &[
            "verify", "--suite", "all", "--n", "2", "--seed", "3", "--trials", "4", "--out",
            "all.json", "--csv", "all.csv",
        ],
        dir,
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("all.json")).unwrap()).unwrap();
    let outcomes = report["outcomes"].as_array().unwrap();
    assert_eq!(outcomes.len(), 7 * 4);
    for o in outcomes {
        assert_ne!(o["report"]["verdict"].as_str().unwrap(), "violated");
    }
    let csv = fs::read_to_string(dir.join("all.csv")).unwrap();
    assert!(csv.starts_with("theorem_id,lhs,rhs,margin,tolerance,verdict,lambda_estimate"));
    assert_eq!(csv.lines().count(), 1 + 7 * 4);
}

#[test]
fn variation_reports_ball_target() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    write_fixtures(dir);
    let out = run(
        &[
            "variation",
            "--phi1",
            r#"{"kind":"power","p":1}"#,
            "--phi2",
            r#"{"kind":"power","p":1}"#,
            "--K",
            "ball1.json",
            "--L",
            "ball1.json",
            "--n",
            "2",
            "--out",
            "var.json",
        ],
        dir,
    );
    assert!(out.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("var.json")).unwrap()).unwrap();
    let target = report["result"]["target"].as_f64().unwrap();
    let extrapolated = report["result"]["extrapolated_limit"].as_f64().unwrap();
    assert!((target - std::f64::consts::PI).abs() < 1e-9);
    assert!((extrapolated - target).abs() < 1e-5 * target);
}

#[test]
fn single_instance_verifiers_cover_all_theorems() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    write_fixtures(dir);

    let cases: Vec<Vec<&str>> = vec![
        vec![
            "verify",
            "--theorem",
            "dual_obm",
            "--phi",
            r#"{"kind":"power_sum","p":3,"sign":"decreasing","m":2}"#,
            "--declare",
            "convex",
            "--K",
            "ball1.json",
            "--L",
            "ellipse.json",
        ],
        vec![
            "verify",
            "--theorem",
            "linear_dual_obm",
            "--phi1",
            r#"{"kind":"power","p":1}"#,
            "--phi2",
            r#"{"kind":"power","p":2}"#,
            "--alpha",
            "1.0",
            "--beta",
            "0.5",
            "--declare",
            "convex",
            "--K",
            "ball1.json",
            "--L",
            "ellipse.json",
        ],
        vec![
            "verify",
            "--theorem",
            "dual_minkowski",
            "--phi",
            r#"{"kind":"power","p":1,"class":"phi"}"#,
            "--K",
            "ellipse.json",
            "--L",
            "ball1.json",
        ],
        vec![
            "verify",
            "--theorem",
            "isoperimetric",
            "--phi",
            r#"{"kind":"power","p":2,"class":"phi"}"#,
            "--K",
            "ellipse.json",
        ],
        vec![
            "verify",
            "--theorem",
            "urysohn",
            "--phi",
            r#"{"kind":"log1p_inv","n":2}"#,
            "--K",
            "ellipse.json",
        ],
        vec![
            "verify",
            "--theorem",
            "comparison",
            "--phi",
            r#"{"kind":"power","p":2}"#,
            "--psi",
            r#"{"kind":"power","p":1}"#,
            "--declare",
            "convex",
            "--K",
            "ellipse.json",
            "--L",
            "ball1.json",
        ],
        vec![
            "verify",
            "--theorem",
            "sl_invariance",
            "--phi",
            r#"{"kind":"power","p":-1}"#,
            "--matrix",
            "[[0.5,0.0],[0.1,2.0]]",
            "--K",
            "ellipse.json",
            "--L",
            "ball1.json",
        ],
    ];
    for mut args in cases {
        args.extend(["--n", "2", "--out", "single.json"]);
        let out = run(&args, dir);
        assert!(
            out.status.success(),
            "{:?}: {}",
            args,
            String::from_utf8_lossy(&out.stderr)
        );
        let report: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.join("single.json")).unwrap()).unwrap();
        let verdict = report["reports"][0]["verdict"].as_str().unwrap();
        assert_ne!(verdict, "violated", "{report}");
    }
}

#[test]
fn sweep_writes_margin_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let out = run(
        &["sweep", "--n", "2", "--steps", "4", "--out", "margins.csv"],
        dir,
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(dir.join("margins.csv")).unwrap();
    assert!(csv.starts_with("theorem_id,eccentricity"));
    assert_eq!(csv.lines().count(), 1 + 4 * 7);
    assert!(!csv.contains(",violated,"));
}

#[test]
fn add_and_functional_commands_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    write_fixtures(dir);

    let out = run(
        &[
            "add",
            "--phi",
            r#"{"kind":"power_sum","p":1,"sign":"decreasing","m":2}"#,
            "--K",
            "ball1.json",
            "--L",
            "ball2.json",
            "--n",
            "2",
            "--samples",
            "5",
            "--out",
            "sum.json",
        ],
        dir,
    );
    assert!(out.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("sum.json")).unwrap()).unwrap();
    // 1-radial sum of balls 1 and 2 has constant radius 3
    for entry in report["radii"].as_array().unwrap() {
        assert!((entry["radius"].as_f64().unwrap() - 3.0).abs() < 1e-10);
    }
    // the emitted descriptor is itself a valid body input
    fs::write(
        dir.join("sum_body.json"),
        serde_json::to_string(&report["body"]).unwrap(),
    )
    .unwrap();
    let out = run(
        &[
            "volume",
            "--K",
            "sum_body.json",
            "--n",
            "2",
            "--out",
            "vol.json",
        ],
        dir,
    );
    assert!(out.status.success());
    let vol: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("vol.json")).unwrap()).unwrap();
    let v = vol["result"]["value"].as_f64().unwrap();
    assert!((v - 9.0 * std::f64::consts::PI).abs() < 1e-8, "v = {v}");

    let out = run(
        &[
            "surface",
            "--phi",
            r#"{"kind":"power","p":2}"#,
            "--K",
            "ellipse.json",
            "--n",
            "2",
            "--out",
            "surf.json",
        ],
        dir,
    );
    assert!(out.status.success());
    let surf: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("surf.json")).unwrap()).unwrap();
    let s = surf["result"]["value"].as_f64().unwrap();
    assert!((s - 10.0 * std::f64::consts::PI).abs() < 1e-8, "s = {s}");

    let out = run(
        &[
            "meanradius",
            "--phi",
            r#"{"kind":"power","p":1}"#,
            "--K",
            "ball2.json",
            "--n",
            "2",
            "--out",
            "mr.json",
        ],
        dir,
    );
    assert!(out.status.success());
    let mr: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("mr.json")).unwrap()).unwrap();
    assert!((mr["result"]["value"].as_f64().unwrap() - 0.5).abs() < 1e-10);
}
