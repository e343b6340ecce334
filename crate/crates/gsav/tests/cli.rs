use std::path::Path;
use std::process::{Command, Output};

use gsav::output::{read_diagnostics, read_snapshot, snapshot_path, DIAGNOSTICS_FILE, DIAGNOSTICS_HEADER};
use gsav_core::model::modified_energy;
use gsav_core::{Boundary, GridSpec};

fn gsav(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gsav"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn small_run(out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "run",
        "--grid-m",
        "16",
        "--t-end",
        "0.1",
        "--tau",
        "0.01",
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    gsav(&args)
}

#[test]
fn run_writes_exact_header_rows_and_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let o = small_run(dir.path(), &["--snapshot-every", "5"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join(DIAGNOSTICS_FILE)).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("step,t,tau,sup_norm,energy,modified_energy,s,g"));
    assert_eq!(DIAGNOSTICS_HEADER, "step,t,tau,sup_norm,energy,modified_energy,s,g");
    assert_eq!(lines.count(), 11);
    for step in [0, 5, 10] {
        assert!(snapshot_path(dir.path(), step).exists(), "snapshot {step}");
    }
    assert!(!snapshot_path(dir.path(), 3).exists());
}

#[test]
fn identical_configs_give_identical_csv_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let extra = ["--init", "random", "--seed", "7", "--potential", "flory-huggins", "--scheme", "ei2"];
    assert_eq!(code(&small_run(a.path(), &extra)), 0);
    assert_eq!(code(&small_run(b.path(), &extra)), 0);
    let x = std::fs::read(a.path().join(DIAGNOSTICS_FILE)).unwrap();
    let y = std::fs::read(b.path().join(DIAGNOSTICS_FILE)).unwrap();
    assert_eq!(x, y);
}

#[test]
fn modified_energy_column_matches_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let o = small_run(
        dir.path(),
        &["--init", "random", "--snapshot-every", "1", "--scheme", "ei1", "--eps", "0.05"],
    );
    assert_eq!(code(&o), 0);
    let grid = GridSpec::new(1.0, 16, Boundary::Periodic).unwrap();
    let rows = read_diagnostics(&dir.path().join(DIAGNOSTICS_FILE)).unwrap();
    assert_eq!(rows.len(), 11);
    for r in &rows {
        let u = read_snapshot(&snapshot_path(dir.path(), r.step), grid).unwrap();
        let recomputed = modified_energy(0.05, &u, r.s);
        assert!((recomputed - r.modified_energy).abs() <= 1e-12, "step {}", r.step);
        assert_eq!(u.norm_inf(), r.sup_norm);
    }
}

#[test]
fn adaptive_rows_stay_in_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let o = gsav(&[
        "run",
        "--grid-m",
        "32",
        "--boundary",
        "neumann",
        "--potential",
        "flory-huggins",
        "--init",
        "random",
        "--adaptive",
        "--tau-min",
        "0.001",
        "--tau-max",
        "0.05",
        "--t-end",
        "1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_diagnostics(&dir.path().join(DIAGNOSTICS_FILE)).unwrap();
    assert_eq!(rows[0].tau, 0.0);
    assert_eq!(rows[1].tau, 0.001);
    for r in &rows[1..] {
        assert!((0.001..=0.05).contains(&r.tau), "tau {}", r.tau);
    }
    assert_eq!(rows.last().unwrap().t, 1.0);
}

#[test]
fn usage_errors_exit_1_and_help_exits_0() {
    assert_eq!(code(&gsav(&["run", "--bogus"])), 1);
    assert_eq!(code(&gsav(&["run", "--scheme", "rk4"])), 1);
    assert_eq!(code(&gsav(&[])), 1);
    assert_eq!(code(&gsav(&["--help"])), 0);
    assert_eq!(code(&gsav(&["--version"])), 0);
}

#[test]
fn invalid_configurations_exit_1() {
    assert_eq!(code(&gsav(&["run", "--grid-m", "8", "--amplitude", "1.5"])), 1);
    assert_eq!(code(&gsav(&["run", "--grid-m", "8", "--t-end", "0"])), 1);
    assert_eq!(code(&gsav(&["run", "--grid-m", "8", "--init", "random", "--lo", "0.5", "--hi", "0.1"])), 1);
}

#[test]
fn invariant_violation_exits_3() {
    let o = gsav(&[
        "run",
        "--grid-m",
        "32",
        "--scheme",
        "ei1",
        "--kappa",
        "0.2",
        "--tau",
        "1",
        "--t-end",
        "10",
        "--init",
        "random",
        "--verify-invariants",
    ]);
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(code(&o), 3, "{err}");
    assert!(err.contains("warning: kappa"));
    assert!(err.contains("invariant violated at step"));
}

#[test]
fn numeric_failure_exits_2() {
    // κ far below the Lipschitz bound lets u leave (-1, 1), where the
    // logarithmic reaction is undefined.
    let o = gsav(&[
        "run",
        "--grid-m",
        "32",
        "--potential",
        "flory-huggins",
        "--scheme",
        "ei1",
        "--kappa",
        "0.8",
        "--tau",
        "1",
        "--t-end",
        "20",
        "--init",
        "random",
    ]);
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(code(&o), 2, "{err}");
    assert!(err.contains("warning: kappa"));
    assert!(err.contains("numeric failure at step"));
}

#[test]
fn verify_passes_on_pinned_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let o = gsav(&["verify", "--report", report.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.len() > 30);
    assert!(checks.iter().all(|c| c["passed"] == true));
}

#[test]
fn verify_negative_control_reports_the_hypothesis() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let o = gsav(&[
        "verify",
        "--profile",
        "invariants",
        "--kappa-factor",
        "0.1",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 3);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    let failed: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(failed.contains(&"kappa_hypothesis/flory-huggins"));
    assert!(failed.iter().any(|n| n.starts_with("trajectory/flory-huggins/") && n.ends_with("tau=1")));
}

#[test]
fn verify_with_empty_profile_list_is_a_trivial_pass() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let o = gsav(&["verify", "--profile", "--report", report.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(v["checks"], serde_json::json!([]));
}

#[test]
fn converge_prints_table_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = gsav(&[
        "converge",
        "--grid-m",
        "16",
        "--eps",
        "0.05",
        "--scheme",
        "ei1",
        "--t-end",
        "0.5",
        "--taus",
        "0.125,0.0625,0.03125",
        "--tau-ref",
        "0.0009765625",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.starts_with("tau,l2_error,linf_error\n"));
    assert!(stdout.contains("slope_l2"));
    let csv = std::fs::read_to_string(dir.path().join("convergence_ei1.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn converge_rejects_a_coarse_reference() {
    let o = gsav(&[
        "converge",
        "--grid-m",
        "8",
        "--t-end",
        "0.5",
        "--taus",
        "0.125,0.0625",
        "--tau-ref",
        "0.0625",
    ]);
    assert_eq!(code(&o), 1);
}
