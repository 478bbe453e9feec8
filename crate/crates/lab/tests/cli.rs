use std::path::Path;
use std::process::{Command, Output};

fn lab(dir: &Path, config: &str, extra: &[&str]) -> Output {
    let path = dir.join("run.conf");
    std::fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_edge-spectral-lab"))
        .arg(&path)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .env_remove("ESL_THREADS")
        .output()
        .unwrap()
}

fn read(dir: &Path, file: &str) -> String {
    std::fs::read_to_string(dir.join("out").join(file)).unwrap()
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(dir.path(), "scenario = ssf\npotential.m = 1.5\n", &[]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("line 2"), "{msg}");

    let out = lab(dir.path(), "fiber.b = 1\n", &[]);
    assert_eq!(out.status.code(), Some(2));

    let missing = Command::new(env!("CARGO_BIN_EXE_edge-spectral-lab"))
        .arg(dir.path().join("absent.conf"))
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn bad_thread_count_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    std::fs::write(&path, "scenario = volume\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_edge-spectral-lab"))
        .arg(&path)
        .env("ESL_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bands_scenario_is_deterministic_and_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let config = "scenario = bands\nsweep.j = 1..2\nsweep.k_min = -6\nsweep.k_max = 6\n";
    let first = lab(dir.path(), config, &["--threads", "2"]);
    assert_eq!(
        first.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&first.stderr)
    );
    let csv = read(dir.path(), "bands_j1.csv");
    let summary = read(dir.path(), "summary.json");
    assert!(csv.starts_with("k,E,dE,disc_error\n"));
    assert_eq!(csv.lines().count(), 65);
    let again = lab(dir.path(), config, &["--threads", "3"]);
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(read(dir.path(), "bands_j1.csv"), csv);
    assert_eq!(read(dir.path(), "bands_j2.csv").lines().count(), 65);
    assert_eq!(read(dir.path(), "summary.json"), summary);

    let v: serde_json::Value = serde_json::from_str(&summary).unwrap();
    assert_eq!(v["config"]["sweep.j"], "1,2");
    assert_eq!(v["config"]["fiber.bc"], "dirichlet");
    assert!(v["version"].as_str().unwrap().contains("esl-core"));
    assert!(v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["passed"] == true));
}

#[test]
fn property_failure_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    // near k = 0 the defect is not yet in its asymptotic regime
    let out = lab(
        dir.path(),
        "scenario = defect\nsweep.k_min = 0.1\nsweep.k_max = 3.5\n",
        &[],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL defect_1"));
}

#[test]
fn numerical_failure_exits_with_three_and_names_lambda() {
    let dir = tempfile::tempdir().unwrap();
    // a budget of 16 nodes cannot hold the symmetric pairs
    let out = lab(
        dir.path(),
        "scenario = ssf\nsweep.lambda = 1e-3\nsweep.node_budget = 16\n",
        &[],
    );
    assert_eq!(out.status.code(), Some(3));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("lambda = 1e-3"), "{msg}");
}

#[test]
fn ssf_sweep_header_and_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(dir.path(), "scenario = ssf\nsweep.lambda = 1e-2\n", &[]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = read(dir.path(), "ssf_sweep.csv");
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("lambda,eps,nodes,n_minus_hi,n_minus_lo,n_plus_hi,n_plus_lo,trace_norm,volume,ratio")
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), 10);
    assert_eq!(row[0], "1.0000000000000000e-2");
    // ε = λ^{3/2} for m = 4 and N(1e-2) = 2.25
    assert_eq!(row[1].parse::<f64>().unwrap(), 1e-3);
    assert!((row[8].parse::<f64>().unwrap() - 2.25).abs() < 1e-12);
    assert!(lines.next().is_none());
}

#[test]
fn neumann_scenario_reports_minimum() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(dir.path(), "scenario = neumann\n", &[]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let v: serde_json::Value = serde_json::from_str(&read(dir.path(), "summary.json")).unwrap();
    let theta = v["metadata"]["theta0"].as_f64().unwrap();
    assert!(theta < 1.0 && (theta - 0.5901).abs() < 1e-3, "{theta}");
    assert_eq!(read(dir.path(), "neumann_minimum.csv").lines().count(), 3);
}

#[test]
fn volume_and_toeplitz_scenarios_pass_their_checks() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(dir.path(), "scenario = volume\nsweep.per_decade = 2\n", &[]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let csv = read(dir.path(), "volume.csv");
    assert_eq!(csv.lines().count(), 10);
    let v: serde_json::Value = serde_json::from_str(&read(dir.path(), "summary.json")).unwrap();
    assert_eq!(v["metadata"]["admissibility"]["admissible"], true);

    let dir = tempfile::tempdir().unwrap();
    let out = lab(
        dir.path(),
        "scenario = toeplitz\nsweep.lambda = 1e-2\n",
        &[],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let counts = read(dir.path(), "toeplitz_counts.csv");
    assert_eq!(
        counts.lines().next(),
        Some("lambda,n_plus,volume_full,ratio")
    );
    let n: usize = counts
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(n, 5);
}

#[test]
fn invert_scenario_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(dir.path(), "scenario = invert\nseed = 7\n", &[]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let csv = read(dir.path(), "rho_j1.csv");
    assert_eq!(
        csv.lines().next(),
        Some("s,rho,rho_derivative,rho_over_sqrt_log")
    );
    // 1e-2 down to 1e-6 at 6 per decade
    assert_eq!(csv.lines().count(), 26);
}
