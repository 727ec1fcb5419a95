use std::path::Path;
use std::process::{Command, Output};

use robin_spectral::config::RunConfig;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_robin-spectral")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect()
}

fn eig_lambdas(text: &str) -> Vec<(f64, usize, usize)> {
    text.lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split_whitespace().collect();
            (f[1].parse().unwrap(), f[2].parse().unwrap(), f[4].parse().unwrap())
        })
        .collect()
}

#[test]
fn eig_ball_at_alpha_one_has_zero_second_eigenvalue() {
    let o = run(&["eig", "--ball", "1", "--alpha", "1", "--count", "3"]);
    assert!(o.status.success());
    let rows = eig_lambdas(&stdout(&o));
    assert_eq!(rows.len(), 2);
    assert!((rows[0].0 + 2.5865628591784).abs() < 1e-10);
    assert_eq!((rows[1].1, rows[1].2), (1, 2));
    assert!(rows[1].0.abs() < 1e-8);
}

#[test]
fn eig_annulus_golden() {
    let o = run(&["eig", "--annulus", "1", "2", "--alpha", "1"]);
    assert!(o.status.success());
    let rows = eig_lambdas(&stdout(&o));
    assert!((rows[0].0 + 2.4063183671743498).abs() < 1e-9);
}

#[test]
fn eig_single_mode() {
    let o = run(&["eig", "--annulus", "1", "2", "--alpha", "0.5", "--ell", "2"]);
    assert!(o.status.success());
    let rows = eig_lambdas(&stdout(&o));
    assert!((rows[0].0 - 0.667145286053401).abs() < 1e-9);
}

#[test]
fn sweep_is_monotone_with_positive_derivative() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o =
        run(&["sweep", "--r1", "1", "--alpha", "1", "--r2-from", "1.2", "--r2-to", "5", "--steps", "6", "--out", out]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap(), text);
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 6);
    assert!(rows.windows(2).all(|w| w[0][1] < w[1][1]));
    assert!(rows.iter().all(|r| r[2] > 0.0));
}

#[test]
fn sweep_with_one_step_has_one_row() {
    let o = run(&["sweep", "--r1", "1", "--alpha", "1", "--r2-from", "1.5", "--r2-to", "2", "--steps", "1"]);
    assert!(o.status.success());
    assert_eq!(csv_rows(&stdout(&o)).len(), 1);
}

#[test]
fn invalid_input_exits_2() {
    for args in [
        &["eig", "--ball", "-1", "--alpha", "1"][..],
        &["eig", "--ball", "1", "--alpha", "0"],
        &["derivative", "--annulus", "2", "1", "--alpha", "1"],
        &["derivative", "--annulus", "1", "2", "--alpha", "1", "--fd-step", "1e-12"],
        &["derivative", "--annulus", "1", "2", "--alpha", "1", "--fd-step", "0.5"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert_eq!(stderr_json(&o)["error"], "invalid_input", "{args:?}");
    }
    assert_eq!(run(&["verify", "--suite", "nope"]).status.code(), Some(2));
}

#[test]
fn missing_stationary_point_exits_3() {
    let o = run(&["derivative", "--annulus", "1", "2", "--alpha", "1", "--field", "pair", "--stationary"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stderr_json(&o)["error"], "solver_failure");
}

#[test]
fn stationary_annulus_has_vanishing_derivative() {
    let o = run(&["derivative", "--annulus", "1", "2", "--alpha", "5", "--field", "pair", "--stationary"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], true);
    let (r1, r2) = (v["r1"].as_f64().unwrap(), v["r2"].as_f64().unwrap());
    assert!((r2 * r2 - r1 * r1 - 3.0).abs() < 1e-9);
}

#[test]
fn halving_the_step_quarters_the_discrepancy() {
    let rel = |h: &str| {
        let o = run(&["derivative", "--annulus", "1", "2", "--alpha", "1", "--fd-step", h]);
        assert!(o.status.success());
        let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
        v["rel_discrepancy"].as_f64().unwrap()
    };
    let ratio = rel("1e-3") / rel("5e-4");
    assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn malformed_config_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let out = dir.path().join("out");
    let mut v = serde_json::to_value(RunConfig::default()).unwrap();
    v["unexpected"] = 1.into();
    std::fs::write(&cfg, v.to_string()).unwrap();
    let o = run(&["verify", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "invalid_input");
    assert!(!out.exists());
}

fn verify_with(cfg: RunConfig, suite: &str, dir: &Path) -> Output {
    let path = dir.join("cfg.json");
    std::fs::write(&path, serde_json::to_string(&cfg).unwrap()).unwrap();
    let out = dir.join("out");
    run(&["verify", "--suite", suite, "--config", path.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

#[test]
fn verify_writes_summary_and_tables() {
    let dir = tempfile::tempdir().unwrap();
    let o = verify_with(RunConfig::default(), "bound", dir.path());
    assert!(o.status.success());
    let out = dir.path().join("out");
    let summary: Value = serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    let reports = summary.as_array().unwrap();
    assert_eq!(reports.len(), 2);
    for r in reports {
        assert_eq!(r["passed"], true);
        for a in r["artifacts"].as_array().unwrap() {
            assert!(out.join(a.as_str().unwrap()).exists());
        }
    }
}

#[test]
fn failing_check_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig { asymptotics_min_ratio: 1e6, ..RunConfig::default() };
    let o = verify_with(cfg, "asymptotics", dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}
