use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn wlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wlab")).args(args).env_remove("WLAB_WORKERS").output().unwrap()
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn config(name: &str) -> String {
    configs().join(name).to_string_lossy().into_owned()
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn body(report: &str) -> &str {
    report.split("\n[timings]").next().unwrap()
}

#[test]
fn nodal_limit_masses_approach_one_half() {
    let dir = tempfile::tempdir().unwrap();
    let out = wlab(&["run", &config("genus2_nodal.toml"), "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(dir.path(), "nodal_limit.csv");
    let mut lines = csv.lines().skip(1);
    assert_eq!(lines.next().unwrap(), "m,node0_mass,node1_mass,off_node_mass,total_mass,max_node_deviation,status");
    let last: Vec<f64> = csv.lines().last().unwrap().split(',').take(6).map(|v| v.parse().unwrap()).collect();
    assert_eq!(last[0], 8.0);
    assert!((last[1] - 0.5).abs() < 0.05 && (last[2] - 0.5).abs() < 0.05, "{last:?}");
    // full-precision cells
    assert!(csv.lines().nth(2).unwrap().split(',').nth(1).unwrap().len() >= 20);
    let dat = read(dir.path(), "nodal_limit.dat");
    assert!(dat.starts_with("# ") && dat.contains("gnuplot"));
    assert_eq!(dat.lines().filter(|l| !l.starts_with('#')).count(), 7);
    let report = read(dir.path(), "report.txt");
    assert!(report.contains("summary: 4/4 checks passed"), "{report}");
    assert!(report.contains("[timings]"));
}

#[test]
fn equidistribution_distance_decreases() {
    let dir = tempfile::tempdir().unwrap();
    let out = wlab(&["run", &config("sextic_equidistribute.toml"), "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let csv = read(dir.path(), "equidistribution.csv");
    let d: Vec<f64> = csv.lines().skip(2).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(d.len(), 3);
    assert!(d[0] > d[1] && d[1] > d[2], "{d:?}");
    for m in [2, 4, 8] {
        assert!(dir.path().join(format!("weierstrass_m{m}.csv")).exists());
    }
}

#[test]
fn negative_radius_is_rejected_before_computing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(
        &cfg,
        "kind = \"nodal-limit\"\n\n[curve]\nnodes = [[[0, 0], [1, 0]], [[2, 0.5], [3, -0.5]]]\n\n[measure]\nnode_radius = -0.1\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = wlab(&["run", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.toml:7:") && err.contains("measure.node_radius"), "{err}");
    assert!(!out_dir.exists());
}

#[test]
fn unknown_keys_are_reported_with_a_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("typo.toml");
    fs::write(&cfg, "kind = \"theta-check\"\n[curve]\nnodes = [[[0, 0], [1, 0]]]\n[grid]\nmm = [2]\n").unwrap();
    let out = wlab(&["run", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(":5:") && err.contains("mm"), "{err}");
}

#[test]
fn repeated_runs_are_identical_modulo_timings() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for (d, workers) in [(&a, "1"), (&b, "3")] {
        let out = Command::new(env!("CARGO_BIN_EXE_wlab"))
            .args(["run", &config("genus2_theta.toml"), "--out", d.path().to_str().unwrap()])
            .env("WLAB_WORKERS", workers)
            .output()
            .unwrap();
        assert!(out.status.success());
    }
    assert_eq!(body(&read(a.path(), "report.txt")), body(&read(b.path(), "report.txt")));
    for f in ["theta_m2.csv", "theta_m3.csv"] {
        assert_eq!(read(a.path(), f), read(b.path(), f));
    }
}

#[test]
fn numerical_failures_keep_partial_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = wlab(&["run", &config("sextic_equidistribute.toml"), "--out", dir.path().to_str().unwrap(), "--tol", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(dir.path().join("bergman_density.csv").exists());
    let csv = read(dir.path(), "equidistribution.csv");
    assert!(csv.lines().skip(2).all(|l| l.contains("failed: quadrature")), "{csv}");
    let report = read(dir.path(), "report.txt");
    assert!(report.contains("FAIL weak distance decreases in m"));
    let names: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    assert!(names.iter().all(|n| !n.starts_with('.')), "{names:?}");
}

#[test]
fn tampered_tolerance_fails_validation_without_crashing() {
    let dir = tempfile::tempdir().unwrap();
    let out = wlab(&["validate", "--tol", "0", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let report = read(dir.path(), "report.txt");
    assert!(report.contains("FAIL criterion 04 Bergman mass conservation: error: quadrature failed"), "{report}");
    assert!(report.contains("PASS criterion 02"));
    assert_eq!(report.lines().filter(|l| l.starts_with("PASS criterion") || l.starts_with("FAIL criterion")).count(), 12);
    assert_eq!(read(dir.path(), "validation.csv").lines().count(), 13);
}

#[test]
fn describe_prints_genus_and_dimensions() {
    let out = wlab(&["describe", &config("genus2_nodal_curve.toml")]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("genus: 2") && text.contains("m = 1..4: 2, 3, 5, 7"), "{text}");
    let missing = wlab(&["describe", "/nonexistent/curve.toml"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn zero_workers_rejected() {
    let out = wlab(&["describe", &config("genus2_nodal_curve.toml"), "--workers", "0"]);
    assert_eq!(out.status.code(), Some(2));
}
