use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn sbmm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sbmm")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn tmp(name: &str, contents: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

const POISSON_SPEC: &str = r#"{"n": 15, "Q": 1, "f": [1.0], "edge_laws": [[{"type": "poisson", "omega": 0.1}]]}"#;

#[test]
fn analyze_reports_exact_rationals() {
    let out = sbmm(&["analyze", "cycle:4"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["density"], "1");
    assert_eq!(v["alpha"], "3/2");
    assert_eq!(v["gamma"], "1");
    assert_eq!(v["strictly_balanced"], true);
}

#[test]
fn analyze_accepts_inline_json() {
    let out = sbmm(&["analyze", r#"{"vertices": 3, "edges": [[0, 1, 2], [1, 2, 1], [0, 2, 1]]}"#]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["rho"], 3);
}

#[test]
fn balancedness_table_lists_sixteen_rows() {
    let out = sbmm(&["table1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 17);
    assert!(text.lines().any(|l| l.starts_with("cycle") && l.contains("3/2")));
}

#[test]
fn bound_prints_a_report() {
    let spec = tmp("bound_spec.json", POISSON_SPEC);
    let out = sbmm(&["bound", "--spec", spec.to_str().unwrap(), "--pattern", "triangle", "--variant", "cor55_poisson_sbm"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["variant"], "cor55_poisson_sbm");
    assert_eq!(v["target"], "poisson");
    assert!(v["value"].as_f64().unwrap() > 0.0);

    let out = sbmm(&[
        "bound", "--spec", spec.to_str().unwrap(), "--pattern", "triangle", "--variant", "thm31_simple", "--c-override", "1",
    ]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["c_source"], "override");
}

#[test]
fn violated_hypothesis_exits_with_two() {
    let spec = tmp("hyp_spec.json", POISSON_SPEC);
    // triangle with a pendant edge is not strictly balanced
    let tadpole = r#"{"vertices": 4, "edges": [[0, 1, 1], [1, 2, 1], [0, 2, 1], [2, 3, 1]]}"#;
    let out = sbmm(&["bound", "--spec", spec.to_str().unwrap(), "--pattern", tadpole, "--variant", "thm31_simple"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("strictly balanced"));
}

#[test]
fn io_errors_exit_with_one() {
    let out = sbmm(&["count", "--graph", "/nonexistent/graph.txt", "--pattern", "triangle"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sample_then_count_matches_the_library() {
    let spec_path = tmp("sample_spec.json", POISSON_SPEC);
    let graph = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("sample_graph.txt");
    let out = sbmm(&["sample", "--spec", spec_path.to_str().unwrap(), "--seed", "11", "--out", graph.to_str().unwrap()]);
    assert!(out.status.success());
    let out = sbmm(&["count", "--graph", graph.to_str().unwrap(), "--pattern", "path:3"]);
    assert!(out.status.success());

    let spec = sbmm::SbmmSpec::from_json(POISSON_SPEC).unwrap();
    let want = sbmm::count_copies(&spec.sample(11), &sbmm::PatternGraph::path(3).unwrap()).unwrap();
    assert_eq!(stdout(&out).trim(), want.to_string());
}

#[test]
fn lambda_prints_json_then_csv_and_ignores_thread_count() {
    let spec = tmp("lambda_spec.json", POISSON_SPEC);
    let args = ["lambda", "--spec", spec.to_str().unwrap(), "--pattern", "triangle", "--kmax", "20"];
    let out = sbmm(&args);
    assert!(out.status.success());
    let text = stdout(&out);
    let (json, csv) = text.split_once("\n\n").unwrap();
    let v: Value = serde_json::from_str(json).unwrap();
    assert!(v["total"].as_f64().unwrap() > 0.0);
    assert!(csv.starts_with("k,prob\n0,"));
    assert_eq!(csv.lines().count(), 22);

    let mut single = vec!["--threads", "1"];
    single.extend(args);
    assert_eq!(stdout(&sbmm(&single)), text);
}

#[test]
fn experiment_writes_report_and_csv() {
    let config = tmp(
        "experiment.json",
        r#"{
            "spec": {"n": 5, "Q": 1, "f": [1.0], "edge_laws": [[{"type": "categorical", "p": [0.75, 0.25]}]]},
            "pattern": "triangle",
            "variant": "thm52_poisson_approx",
            "mode": "exact"
        }"#,
    );
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("experiment_csv");
    let report = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("experiment_report.json");
    let out = sbmm(&[
        "experiment",
        "--config",
        config.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
        "--csv-dir",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("pass true"));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["target"], "poisson");
    assert_eq!(v["pass"], true);
    assert!(std::fs::read_to_string(dir.join("observed_pmf.csv")).unwrap().starts_with("k,prob\n0,"));
    assert!(dir.join("target_pmf.csv").is_file());
}
