mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::*;
use serde_json::Value;

fn abcd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_abcd"))
        .args(args)
        .env_remove("ABCD_CONFIG")
        .output()
        .unwrap()
}

fn program(name: &str) -> String {
    fixtures()
        .join("programs")
        .join(format!("{name}.vp"))
        .display()
        .to_string()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn write_manifest(dir: &Path, name: &str, programs: &[(&str, &str)]) -> String {
    let lines: Vec<String> = programs
        .iter()
        .map(|(prog, dataset)| serde_json::json!({"id": prog, "path": program(prog), "dataset": dataset}).to_string())
        .collect();
    let path = dir.join(name);
    std::fs::write(&path, lines.join("\n") + "\n").unwrap();
    path.display().to_string()
}

fn corpus_report(dir: &Path, name: &str, programs: &[(&str, &str)]) -> String {
    let manifest = write_manifest(dir, &format!("{name}.jsonl"), programs);
    let report = dir.join(format!("{name}.json")).display().to_string();
    let out = abcd(&["corpus", &manifest, "-o", &report]);
    assert!(out.status.success(), "{}", stderr(&out));
    report
}

#[test]
fn analyze_reports_listing_metrics_as_json() {
    let out = abcd(&["analyze", &program("fevori"), "--format", "json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["vlm"]["call_count"], 2);
    assert_eq!(v["vlm"]["unresolved_sites"], 0);
    assert_eq!(v["edges"], v["edges_field"]);
    assert_eq!(v["sites"].as_array().unwrap().len(), 2);
}

#[test]
fn analyze_respects_registry_and_edge_mode_flags() {
    let out = abcd(&[
        "analyze",
        &program("conquer"),
        "--format",
        "json",
        "--registry",
        "simple_query",
        "--edge-mode",
        "tree",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["vlm"]["call_count"], 6);
    assert_eq!(v["edges"], v["edges_tree"]);
}

#[test]
fn analyze_table_is_default() {
    let out = abcd(&["analyze", &program("fevori")]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("vlm calls"), "{}", stdout(&out));
}

#[test]
fn missing_file_is_an_io_failure() {
    let out = abcd(&["analyze", "/nonexistent/prog.vp"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!stderr(&out).is_empty());
}

#[test]
fn parse_error_reports_position() {
    let bad = fixtures().join("invalid").join("bad.vp").display().to_string();
    let out = abcd(&["analyze", &bad]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("bad.vp:"), "{err}");
    assert!(err.chars().any(|c| c.is_ascii_digit()), "{err}");
}

#[test]
fn dump_ast_prints_sexpr_and_json() {
    let out = abcd(&["dump-ast", &program("pass")]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim_end(), "(Module (Pass))");
    let out = abcd(&["dump-ast", &program("fevori"), "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["kind"], "Module");
}

#[test]
fn lint_exit_codes_follow_severity() {
    let out = abcd(&["lint", &program("fevori")]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let out = abcd(&["lint", &program("bad_entry")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("error ["), "{}", stdout(&out));
}

#[test]
fn corpus_output_is_reproducible_with_seed() {
    let manifest = fixtures().join("corpus.jsonl").display().to_string();
    let run = || abcd(&["corpus", &manifest, "--sample", "3", "--seed", "9"]);
    let (a, b) = (run(), run());
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let serial = abcd(&["corpus", &manifest, "--sample", "3", "--seed", "9", "--serial"]);
    assert_eq!(a.stdout, serial.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["programs"].as_array().unwrap().len(), 9);
}

#[test]
fn corpus_formats() {
    let manifest = fixtures().join("corpus.jsonl").display().to_string();
    let table = stdout(&abcd(&["corpus", &manifest, "--format", "table"]));
    assert!(table.contains("tim-conquer-style"), "{table}");
    let csv = stdout(&abcd(&["corpus", &manifest, "--format", "csv"]));
    assert_eq!(csv.lines().count(), 4, "{csv}");
}

#[test]
fn oversized_sample_is_a_usage_error() {
    let manifest = fixtures().join("corpus.jsonl").display().to_string();
    let out = abcd(&["corpus", &manifest, "--sample", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("10"), "{}", stderr(&out));
}

#[test]
fn malformed_manifest_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.jsonl");
    std::fs::write(&path, "{\"id\": \"a\", \"path\": \"x.vp\"}\n").unwrap();
    let out = abcd(&["corpus", &path.display().to_string()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("line 1"), "{}", stderr(&out));
}

#[test]
fn compare_with_itself_has_zero_deltas() {
    let dir = tempfile::tempdir().unwrap();
    let report = corpus_report(dir.path(), "r", &[("nextqa_01", "n"), ("nextqa_02", "n")]);
    let out = abcd(&["compare", &report, &report, "--format", "json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    for d in v[0]["deltas"].as_array().unwrap() {
        assert_eq!(d["delta"], 0.0, "{d}");
        assert_eq!(d["verdict"], "equal");
    }
}

#[test]
fn compare_orders_datasets() {
    let dir = tempfile::tempdir().unwrap();
    let nextqa: Vec<(&str, &str)> = ["nextqa_01", "nextqa_02", "nextqa_03"]
        .iter()
        .map(|p| (*p, "nextqa-style"))
        .collect();
    let tim: Vec<(&str, &str)> = ["tim_01", "tim_02", "tim_03"]
        .iter()
        .map(|p| (*p, "tim-style"))
        .collect();
    let a = corpus_report(dir.path(), "a", &nextqa);
    let b = corpus_report(dir.path(), "b", &tim);
    let out = abcd(&["compare", &a, &b, "--format", "json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let nodes = v[0]["deltas"]
        .as_array()
        .unwrap()
        .iter()
        .find(|d| d["metric"] == "ast_nodes")
        .unwrap();
    assert_eq!(nodes["verdict"], "greater");
    let table = stdout(&abcd(&["compare", &a, &b]));
    assert!(table.contains("greater"), "{table}");
}

#[test]
fn compare_rejects_mismatched_configs() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_manifest(dir.path(), "m.jsonl", &[("tim_01", "t")]);
    let a = dir.path().join("a.json").display().to_string();
    let b = dir.path().join("b.json").display().to_string();
    assert!(abcd(&["corpus", &manifest, "-o", &a]).status.success());
    assert!(abcd(&["corpus", &manifest, "--edge-mode", "tree", "-o", &b])
        .status
        .success());
    let out = abcd(&["compare", &a, &b]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn compare_rejects_malformed_report() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"schema_version\": 1}").unwrap();
    let out = abcd(&["compare", &bad.display().to_string(), &bad.display().to_string()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(&config, r#"{"registry": ["simple_query"], "edge_mode": "tree"}"#).unwrap();
    let config = config.display().to_string();
    let out = abcd(&["analyze", &program("conquer"), "--format", "json", "--config", &config]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["vlm"]["call_count"], 6);
    assert_eq!(v["edges"], v["edges_tree"]);
    let out = abcd(&[
        "analyze",
        &program("conquer"),
        "--format",
        "json",
        "--config",
        &config,
        "--edge-mode",
        "field",
    ]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["edges"], v["edges_field"]);
}

#[test]
fn invalid_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(&config, r#"{"registry": ["not valid"]}"#).unwrap();
    let out = abcd(&["analyze", &program("pass"), "--config", &config.display().to_string()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_and_unknown_flags() {
    for sub in ["analyze", "corpus", "compare", "dump-ast", "lint"] {
        let out = abcd(&[sub, "--help"]);
        assert_eq!(out.status.code(), Some(0), "{sub}");
        assert!(stdout(&out).contains("Usage"), "{sub}");
    }
    assert_eq!(abcd(&["analyze", "--bogus"]).status.code(), Some(2));
    assert_eq!(abcd(&[]).status.code(), Some(2));
}
