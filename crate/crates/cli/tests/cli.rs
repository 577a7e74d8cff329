use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_complementarity"))
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn simulate_reports_the_reference_scenario() {
    let o = run(&["simulate", "--gamma", "22.5", "--rh", "0.1244", "--rv", "0.4645", "--theta", "90", "--phi", "180", "--estimator", "both"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let estimates = v["estimates"].as_array().unwrap();
    assert_eq!(estimates.len(), 2);
    let optimal = &estimates[1]["relations"];
    assert_eq!(optimal["scenario"]["x_estimator"], "optimal");
    assert_eq!(optimal["satisfied"]["ak"], false);
    for rel in ["hall", "ozawa", "new"] {
        assert_eq!(optimal["satisfied"][rel], true);
    }
    let ak = optimal["lhs_ak"].as_f64().unwrap();
    assert!((ak - 0.2737).abs() < 5e-4);
}

#[test]
fn output_files_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<PathBuf> = (0..2).map(|i| dir.path().join(format!("sweep{i}.csv"))).collect();
    for p in &paths {
        let o = run(&["sweep", "--phi", "135,157.5,180,202.5,225", "--out", p.to_str().unwrap()]);
        assert!(o.status.success());
    }
    let a = std::fs::read(&paths[0]).unwrap();
    let b = std::fs::read(&paths[1]).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), 6);
    // new <= hall <= ozawa and new > ak for the optimal estimate on every row.
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    for row in text.lines().skip(1) {
        let cells: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        let (ak, hall, ozawa, new) = (
            cells[col("optimal_lhs_ak")],
            cells[col("optimal_lhs_hall")],
            cells[col("optimal_lhs_ozawa")],
            cells[col("optimal_lhs_new")],
        );
        assert!(ozawa >= hall && hall >= new && new > ak, "{row}");
    }
}

#[test]
fn sweep_accepts_ranges_and_json() {
    let o = run(&["sweep", "--phi", "135:225:22.5", "--format", "json", "--estimator", "optimal"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let phis: Vec<f64> = v.as_array().unwrap().iter().map(|a| a["phi_deg"].as_f64().unwrap()).collect();
    assert_eq!(phis, vec![135.0, 157.5, 180.0, 202.5, 225.0]);
}

#[test]
fn analyze_measured_table() {
    let o = run(&[
        "analyze",
        "--dist-file",
        fixture("measured_phi180.csv").to_str().unwrap(),
        "--state-file",
        fixture("tomographic_state.csv").to_str().unwrap(),
        "--estimator",
        "optimal",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["provenance"], "measured");
    let r = &v["estimates"][0]["relations"];
    assert_eq!(r["satisfied"]["ak"], false);
    assert_eq!(r["satisfied"]["new"], true);
    let f_plus = v["estimates"][0]["x_estimator"]["plus"].as_f64().unwrap();
    assert!((f_plus - 0.630).abs() < 0.02);
}

#[test]
fn exit_codes_partition_failures() {
    // Data error: the unnormalised column.
    let o = run(&["analyze", "--dist-file", fixture("measured_phi135.csv").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("1.4381"));
    // Usage errors.
    assert_eq!(run(&["simulate", "--gamma", "10", "--state-file", "x.csv"]).status.code(), Some(2));
    assert_eq!(run(&["analyze"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--phi", "10:0:5"]).status.code(), Some(2));
    assert_eq!(run(&["simulate", "--tolerance-profile", "loose"]).status.code(), Some(2));
    // I/O error.
    assert_eq!(run(&["analyze", "--dist-file", "/nonexistent/table.csv"]).status.code(), Some(1));
    // Invalid model parameters are data errors.
    assert_eq!(run(&["simulate", "--rh", "0.3", "--rv", "0.3"]).status.code(), Some(3));
}

#[test]
fn verify_is_deterministic_and_passes() {
    let a = run(&["verify", "--trials", "200", "--seed", "7"]);
    let b = run(&["verify", "--trials", "200", "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v["seed"], 7);
    assert_eq!(v["passed"], true);
    assert!(v["ak_violations"].as_u64().unwrap() > 0);
    for s in v["suites"].as_array().unwrap() {
        assert_eq!(s["failures"], 0, "{s}");
    }
}
