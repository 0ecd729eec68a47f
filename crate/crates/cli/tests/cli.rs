//! End-to-end checks of the `atc` binary: exit codes, report formats, DOT
//! export, and the DIMACS reduction round trip.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .to_str()
        .unwrap()
        .to_string()
}

fn atc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_atc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("utf-8 stderr")
}

fn scratch_dir(test: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("atc-cli-{}-{test}", std::process::id()));
    fs::create_dir_all(&dir).expect("scratch dir");
    dir
}

#[test]
fn local_root_match_holds_on_main_fixture() {
    let out = atc(&[
        "check",
        "--system",
        &fixture("sys_b.json"),
        "--tree",
        &fixture("tree1.json"),
        "--property",
        "match",
        "--scope",
        "local",
        "--node",
        "root",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("\u{2713} root match holds"));
}

#[test]
fn global_match_fails_at_the_and_node() {
    let out = atc(&[
        "check",
        "--system",
        &fixture("sys_b.json"),
        "--tree",
        &fixture("tree1.json"),
        "--property",
        "match",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    let failing: Vec<&str> = text.lines().filter(|l| l.starts_with('\u{2717}')).collect();
    assert_eq!(failing.len(), 1, "exactly one failing node:\n{text}");
    assert!(failing[0].starts_with("\u{2717} 1 match fails"));
    assert!(failing[0].contains("evidence: e0p ->"));
    assert!(failing[0].ends_with("-> e7"));
}

#[test]
fn over_counterexample_is_the_roof_edge() {
    let out = atc(&[
        "check",
        "--system",
        &fixture("sys_c.json"),
        "--tree",
        &fixture("tree2.json"),
        "--property",
        "over",
        "--scope",
        "local",
        "--node",
        "root",
        "--witness",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("evidence: e8 -> e9"));
}

#[test]
fn json_report_has_stable_fields() {
    let out = atc(&[
        "check",
        "--system",
        &fixture("sys_c.json"),
        "--tree",
        &fixture("tree2.json"),
        "--property",
        "over",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let reports: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    let list = reports.as_array().expect("a list of reports");
    assert_eq!(list.len(), 1);
    let report = &list[0];
    for field in ["node", "property", "verdict", "evidence", "engine", "stats"] {
        assert!(report.get(field).is_some(), "missing field {field}");
    }
    assert_eq!(report["node"], "root");
    assert_eq!(report["verdict"], "fails");
    assert_eq!(report["evidence"], serde_json::json!(["e8", "e9"]));
}

#[test]
fn oracle_engine_agrees_on_the_global_suite() {
    for property in ["non-empty", "admissible", "meet", "under", "over", "match"] {
        let run = |engine: &str| {
            let out = atc(&[
                "check",
                "--system",
                &fixture("sys_b.json"),
                "--tree",
                &fixture("tree1.json"),
                "--property",
                property,
                "--engine",
                engine,
            ]);
            let verdicts: Vec<String> = stdout(&out)
                .lines()
                .map(|l| {
                    let mut parts = l.split_whitespace();
                    format!(
                        "{} {}",
                        parts.nth(1).unwrap_or_default(),
                        parts.nth(1).unwrap_or_default()
                    )
                })
                .collect();
            (out.status.code(), verdicts)
        };
        let (exact_code, exact) = run("exact");
        let (oracle_code, oracle) = run("oracle");
        assert_eq!(exact_code, oracle_code, "{property} exit codes differ");
        assert_eq!(exact, oracle, "{property} verdicts differ");
    }
}

#[test]
fn local_scope_requires_a_node_selector() {
    let out = atc(&[
        "check",
        "--system",
        &fixture("sys_b.json"),
        "--tree",
        &fixture("tree1.json"),
        "--property",
        "match",
        "--scope",
        "local",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--node is required"));
}

#[test]
fn global_scope_rejects_a_node_selector() {
    let out = atc(&[
        "check",
        "--system",
        &fixture("sys_b.json"),
        "--tree",
        &fixture("tree1.json"),
        "--property",
        "match",
        "--node",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn refinement_property_on_a_leaf_is_a_usage_error() {
    let out = atc(&[
        "check",
        "--system",
        &fixture("sys_b.json"),
        "--tree",
        &fixture("tree1.json"),
        "--property",
        "match",
        "--scope",
        "local",
        "--node",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("leaf"));
}

#[test]
fn unknown_node_and_bad_selector_exit_2() {
    for node in ["5", "1.9.9", "x"] {
        let out = atc(&[
            "check",
            "--system",
            &fixture("sys_b.json"),
            "--tree",
            &fixture("tree1.json"),
            "--property",
            "match",
            "--scope",
            "local",
            "--node",
            node,
        ]);
        assert_eq!(out.status.code(), Some(2), "selector {node}");
    }
}

#[test]
fn unreadable_and_malformed_inputs_exit_2() {
    let dir = scratch_dir("malformed");
    let bad = dir.join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    let out = atc(&[
        "check",
        "--system",
        bad.to_str().unwrap(),
        "--tree",
        &fixture("tree1.json"),
        "--property",
        "match",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = atc(&[
        "check",
        "--system",
        dir.join("missing.json").to_str().unwrap(),
        "--tree",
        &fixture("tree1.json"),
        "--property",
        "match",
    ]);
    assert_eq!(out.status.code(), Some(2));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn unknown_property_is_a_usage_error() {
    let out = atc(&[
        "check",
        "--system",
        &fixture("sys_b.json"),
        "--tree",
        &fixture("tree1.json"),
        "--property",
        "sideways",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn arity_cap_exits_3_by_flag_and_env() {
    let out = atc(&[
        "check",
        "--system",
        &fixture("sys_b.json"),
        "--tree",
        &fixture("tree1.json"),
        "--property",
        "match",
        "--scope",
        "local",
        "--node",
        "1",
        "--max-and-arity",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("arity"));

    let out = Command::new(env!("CARGO_BIN_EXE_atc"))
        .args([
            "check",
            "--system",
            &fixture("sys_b.json"),
            "--tree",
            &fixture("tree1.json"),
            "--property",
            "match",
            "--scope",
            "local",
            "--node",
            "1",
        ])
        .env("ATC_MAX_AND_ARITY", "1")
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn witness_flag_reveals_holding_evidence() {
    let args = |witness: bool| {
        let mut v = vec![
            "check".to_string(),
            "--system".into(),
            fixture("sys_b.json"),
            "--tree".into(),
            fixture("tree1.json"),
            "--property".into(),
            "meet".into(),
            "--scope".into(),
            "local".into(),
            "--node".into(),
            "root".into(),
        ];
        if witness {
            v.push("--witness".into());
        }
        v
    };
    let plain = atc(&args(false).iter().map(String::as_str).collect::<Vec<_>>());
    let with = atc(&args(true).iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(plain.status.code(), Some(0));
    assert_eq!(with.status.code(), Some(0));
    assert!(!stdout(&plain).contains("evidence:"));
    assert!(stdout(&with).contains("evidence:"));
}

#[test]
fn out_flag_writes_the_report_file() {
    let dir = scratch_dir("outfile");
    let report = dir.join("report.json");
    let out = atc(&[
        "check",
        "--system",
        &fixture("sys_b.json"),
        "--tree",
        &fixture("tree1.json"),
        "--property",
        "match",
        "--format",
        "json",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).is_empty());
    let written = fs::read_to_string(&report).unwrap();
    assert!(serde_json::from_str::<serde_json::Value>(&written).is_ok());
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn dot_export_lists_the_chain_edge_and_labels() {
    let out = atc(&["export-dot", "--system", &fixture("sys_a.json")]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("\"e0\" -> \"e1\""));
    assert!(text.contains("outside_ready"));
    assert!(!text.contains("true"), "implicit labels stay out of the DOT");
}

#[test]
fn dot_export_annotates_tree_nodes_with_goals() {
    let out = atc(&[
        "export-dot",
        "--system",
        &fixture("sys_b.json"),
        "--tree",
        &fixture("tree1.json"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("digraph system"));
    assert!(text.contains("digraph tree"));
    for node in ["root", "0", "1", "1.0", "1.1", "1.1.0", "1.1.1", "1.1.2"] {
        assert!(text.contains(&format!("\"{node}\" [label=")), "node {node}");
    }
    assert!(text.contains("[OR]"));
    assert!(text.contains("[AND]"));
    assert!(text.contains("[SAND]"));
    assert!(text.contains(">> room2_undetected"));
}

#[test]
fn dot_export_rejects_invalid_json() {
    let dir = scratch_dir("dot-bad");
    let bad = dir.join("bad.json");
    fs::write(&bad, "[1, 2,").unwrap();
    let out = atc(&["export-dot", "--system", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn gen_sat_output_checks_as_satisfiable() {
    let dir = scratch_dir("gensat");
    let sys = dir.join("sys.json");
    let tree = dir.join("tree.json");
    let out = atc(&[
        "gen-sat",
        "--cnf",
        &fixture("sat_example.cnf"),
        "--system-out",
        sys.to_str().unwrap(),
        "--tree-out",
        tree.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let check = atc(&[
        "check",
        "--system",
        sys.to_str().unwrap(),
        "--tree",
        tree.to_str().unwrap(),
        "--property",
        "admissible",
        "--scope",
        "local",
        "--node",
        "root",
    ]);
    assert_eq!(check.status.code(), Some(0), "stderr: {}", stderr(&check));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn gen_sat_detects_unsatisfiable_instances() {
    let dir = scratch_dir("gensat-unsat");
    let cnf = dir.join("unsat.cnf");
    fs::write(&cnf, "p cnf 1 2\n1 0\n-1 0\n").unwrap();
    let sys = dir.join("sys.json");
    let tree = dir.join("tree.json");
    let out = atc(&[
        "gen-sat",
        "--cnf",
        cnf.to_str().unwrap(),
        "--system-out",
        sys.to_str().unwrap(),
        "--tree-out",
        tree.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let check = atc(&[
        "check",
        "--system",
        sys.to_str().unwrap(),
        "--tree",
        tree.to_str().unwrap(),
        "--property",
        "admissible",
        "--scope",
        "local",
        "--node",
        "root",
    ]);
    assert_eq!(check.status.code(), Some(1));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn gen_sat_rejects_a_malformed_header() {
    let dir = scratch_dir("gensat-bad");
    let cnf = dir.join("bad.cnf");
    fs::write(&cnf, "p cnf x 2\n1 0\n").unwrap();
    let out = atc(&[
        "gen-sat",
        "--cnf",
        cnf.to_str().unwrap(),
        "--system-out",
        dir.join("s.json").to_str().unwrap(),
        "--tree-out",
        dir.join("t.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    fs::remove_dir_all(&dir).ok();
}
