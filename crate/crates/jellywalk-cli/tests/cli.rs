//! End-to-end tests of the command-line surface: subcommands, exit codes,
//! file formats, and reproducibility.

use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

fn jellywalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jellywalk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_graph(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const TRIANGLE: &str =
    r#"{"vertices":3,"edges":[[1,2],[2,3],[1,3]],"tails":[{"attach":1},{"attach":2}]}"#;
const TWO_VERTEX: &str = r#"{"vertices":2,"edges":[[1,2]],"tails":[{"attach":1},{"attach":2}]}"#;

#[test]
fn validate_ok_and_failure_codes() {
    let dir = tempdir().unwrap();
    let good = write_graph(dir.path(), "good.json", TRIANGLE);
    let out = jellywalk(&["validate", "--graph", &good]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("valid"));

    let bad = write_graph(
        dir.path(),
        "bad.json",
        r#"{"vertices":2,"edges":[[1,1]],"tails":[{"attach":1}]}"#,
    );
    let out = jellywalk(&["validate", "--graph", &bad]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_json_gives_machine_readable_error() {
    let dir = tempdir().unwrap();
    let bad = write_graph(dir.path(), "bad.json", "{nope");
    let out = jellywalk(&["validate", "--graph", &bad]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    let err: serde_json::Value = serde_json::from_str(stderr.trim()).unwrap();
    assert!(err.get("error").is_some());
}

#[test]
fn analyze_two_vertex_p0_column() {
    let dir = tempdir().unwrap();
    let path = write_graph(dir.path(), "two.json", TWO_VERTEX);
    let out = jellywalk(&["analyze", "--graph", &path, "--alphas", "1,0"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let p0: Vec<f64> = doc["vertices"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v["p0"].as_f64().unwrap())
        .collect();
    assert!((p0[0] + 1.0).abs() < 1e-10);
    assert!((p0[1] - 1.0).abs() < 1e-10);
    assert_eq!(doc["argmax_p0"], serde_json::json!([2]));
}

#[test]
fn solve_methods_agree() {
    let dir = tempdir().unwrap();
    let graph = write_graph(dir.path(), "g.json", TRIANGLE);
    let a = jellywalk(&["solve", "--graph", &graph, "--alphas", "1,0", "--method", "electric"]);
    let b = jellywalk(&["solve", "--graph", &graph, "--alphas", "1,0", "--method", "fixed-point"]);
    assert!(a.status.success() && b.status.success());
    let da: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let db: serde_json::Value = serde_json::from_slice(&b.stdout).unwrap();
    for (x, y) in da["core"]
        .as_array()
        .unwrap()
        .iter()
        .zip(db["core"].as_array().unwrap())
    {
        let dx = x["psi"]["re"].as_f64().unwrap() - y["psi"]["re"].as_f64().unwrap();
        assert!(dx.abs() < 1e-9);
    }
}

#[test]
fn solve_csv_output() {
    let dir = tempdir().unwrap();
    let graph = write_graph(dir.path(), "g.json", TWO_VERTEX);
    let out = jellywalk(&[
        "solve", "--graph", &graph, "--alphas", "1,0", "--method", "electric", "--output", "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("arrow,origin,target,psi_re,psi_im\n"));
    assert!(text.contains("0,1,2,1,0"));
}

#[test]
fn scatter_reports_grover_deviation() {
    let dir = tempdir().unwrap();
    let graph = write_graph(dir.path(), "g.json", TRIANGLE);
    let out = jellywalk(&["scatter", "--graph", &graph]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["grover_deviation"].as_f64().unwrap() < 1e-10);
    // m = 2: the swap matrix.
    assert!((doc["matrix"][0][1][0].as_f64().unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn verify_triangle_exits_zero() {
    let dir = tempdir().unwrap();
    let graph = write_graph(dir.path(), "g.json", TRIANGLE);
    let out = jellywalk(&["verify", "--graph", &graph, "--alphas", "1,0"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn verify_exit_code_on_absurd_tolerance() {
    let dir = tempdir().unwrap();
    let graph = write_graph(dir.path(), "g.json", TRIANGLE);
    let out = jellywalk(&["verify", "--graph", &graph, "--alphas", "1,0", "--tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn tolerance_env_var_is_honored() {
    let dir = tempdir().unwrap();
    let graph = write_graph(dir.path(), "g.json", TRIANGLE);
    let out = Command::new(env!("CARGO_BIN_EXE_jellywalk"))
        .args(["verify", "--graph", &graph, "--alphas", "1,0"])
        .env("JELLYWALK_TOL", "1e-30")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn evolve_reports_convergence_and_trace() {
    let dir = tempdir().unwrap();
    let graph = write_graph(dir.path(), "g.json", TWO_VERTEX);
    let trace = dir.path().join("trace.csv");
    let out = jellywalk(&[
        "evolve",
        "--graph",
        &graph,
        "--alphas",
        "1,0",
        "--steps",
        "20",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["converged_at"], serde_json::json!(2));
    assert_eq!(doc["oscillating"], serde_json::json!(false));

    let text = std::fs::read_to_string(&trace).unwrap();
    assert!(text.starts_with("t,arrow,re,im\n"));
    // 21 states x 4 slots + header.
    assert_eq!(text.lines().count(), 1 + 21 * 4);
}

#[test]
fn generate_is_reproducible_and_valid() {
    let dir = tempdir().unwrap();
    let p1 = dir.path().join("a.json");
    let p2 = dir.path().join("b.json");
    for p in [&p1, &p2] {
        let out = jellywalk(&[
            "generate", "--n", "7", "--edges", "10", "--tails", "3", "--seed", "5", "--out",
            p.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    let a = std::fs::read(&p1).unwrap();
    let b = std::fs::read(&p2).unwrap();
    assert_eq!(a, b);

    let out = jellywalk(&["validate", "--graph", p1.to_str().unwrap()]);
    assert!(out.status.success());
}

#[test]
fn verify_passes_on_seeded_random_instances() {
    let dir = tempdir().unwrap();
    for seed in 0..50u64 {
        let path = dir.path().join(format!("g{seed}.json"));
        let n = 1 + (seed as usize * 7) % 10;
        let edges = n + seed as usize % 3;
        let tails = 1 + seed as usize % 6;
        let out = jellywalk(&[
            "generate",
            "--n",
            &n.to_string(),
            "--edges",
            &edges.to_string(),
            "--tails",
            &tails.to_string(),
            "--seed",
            &seed.to_string(),
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        let out = jellywalk(&[
            "verify",
            "--graph",
            path.to_str().unwrap(),
            "--seed",
            &seed.to_string(),
        ]);
        assert!(
            out.status.success(),
            "seed {seed}: {}{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn complex_alphas_accepted_as_json() {
    let dir = tempdir().unwrap();
    let graph = write_graph(dir.path(), "g.json", TWO_VERTEX);
    let out = jellywalk(&["solve", "--graph", &graph, "--alphas", "[1, [0, 0.5]]"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["betas"].as_array().unwrap().len() == 2);
}

#[test]
fn wrong_alpha_count_rejected() {
    let dir = tempdir().unwrap();
    let graph = write_graph(dir.path(), "g.json", TWO_VERTEX);
    let out = jellywalk(&["solve", "--graph", &graph, "--alphas", "1"]);
    assert_eq!(out.status.code(), Some(1));
}
