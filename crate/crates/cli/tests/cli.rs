use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn circuits() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../circuits")
}

fn telesistor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_telesistor")).args(args).env_remove("TELESISTOR_SEED").output().unwrap()
}

fn compile_to(dir: &Path, circuit: &str) -> String {
    let net = dir.join(format!("{circuit}.net"));
    let src = circuits().join(format!("{circuit}.qc"));
    let out = telesistor(&["compile", src.to_str().unwrap(), "-o", net.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    net.to_str().unwrap().to_owned()
}

#[test]
fn verify_teleport_succeeds() {
    let src = circuits().join("teleport.qc");
    let out = telesistor(&["verify", src.to_str().unwrap(), "--trials", "8", "--tol", "1e-10"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("max deviation"));
}

#[test]
fn verify_with_impossible_tolerance_fails_with_outcomes() {
    let src = circuits().join("t_gate.qc");
    let out = telesistor(&["verify", src.to_str().unwrap(), "--trials", "2", "--tol=-1"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("on outcomes "), "{err}");
}

#[test]
fn outcome_length_mismatch_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let net = compile_to(dir.path(), "teleport");
    let out = telesistor(&["run", &net, "--inputs", "000", "--outcomes", "0101"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("outcome count mismatch"));
}

#[test]
fn forced_run_replays_sampled_run() {
    let dir = tempfile::tempdir().unwrap();
    let net = compile_to(dir.path(), "t_gate");
    let sampled = telesistor(&["run", &net, "--inputs", "1", "--seed", "11"]);
    assert!(sampled.status.success());
    let stdout = String::from_utf8(sampled.stdout).unwrap();
    let bits = stdout.lines().next().unwrap().strip_prefix("outcomes ").unwrap();
    let forced = telesistor(&["run", &net, "--inputs", "1", "--outcomes", bits]);
    assert!(forced.status.success());
    assert_eq!(String::from_utf8(forced.stdout).unwrap(), stdout);
}

#[test]
fn seed_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let net = compile_to(dir.path(), "t_gate");
    let explicit = telesistor(&["run", &net, "--inputs", "plus", "--seed", "5"]);
    let from_env = Command::new(env!("CARGO_BIN_EXE_telesistor"))
        .args(["run", &net, "--inputs", "plus"])
        .env("TELESISTOR_SEED", "5")
        .output()
        .unwrap();
    assert!(explicit.status.success() && from_env.status.success());
    assert_eq!(explicit.stdout, from_env.stdout);
}

#[test]
fn tableau_backend_rejects_t_injection() {
    let dir = tempfile::tempdir().unwrap();
    let net = compile_to(dir.path(), "t_gate");
    let out = telesistor(&["run", &net, "--inputs", "0", "--backend", "tableau"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("backend does not support"));
}

#[test]
fn circuit_errors_print_the_grammar() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.qc");
    std::fs::write(&bad, "qubits 2\nCNOT 0 1\n").unwrap();
    let out = telesistor(&["compile", bad.to_str().unwrap(), "-o", dir.path().join("x").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2, column 1") && err.contains("circuit grammar"), "{err}");
}

#[test]
fn phase_lab_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("lab.csv");
    let out = telesistor(&[
        "phase-lab",
        "--lambda-grid",
        "0:0.04:5",
        "--length",
        "6",
        "--junk-dim",
        "2",
        "--seed",
        "3",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("lambda,fidelity,string_order"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0][0], 0.0);
    assert!((rows[0][1] - 1.0).abs() < 1e-12 && (rows[0][2] - 1.0).abs() < 1e-12);
    for r in &rows {
        assert!(r[1] <= 1.0 + 1e-12 && r[2] <= 1.0 + 1e-12);
    }
}

#[test]
fn malformed_grid_is_a_usage_error() {
    let out = telesistor(&["phase-lab", "--lambda-grid", "0:1", "--out", "/dev/null"]);
    assert_eq!(out.status.code(), Some(2));
}
