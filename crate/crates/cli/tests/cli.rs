//! End-to-end tests of the `gra` binary: exit codes and the JSON surfaces.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn fixture(name: &str) -> String {
    let mut path = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    path.push("tests/fixtures");
    path.push(name);
    path.to_string_lossy().into_owned()
}

fn gra(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gra"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn check_not_contained_prints_witness_and_exits_1() {
    let out = gra(&["check", &fixture("universal.gra"), &fixture("lad.gra")]);
    assert_eq!(exit_code(&out), 1);
    let text = stdout(&out);
    assert!(text.contains("NOT CONTAINED"), "stdout: {text}");
    assert!(text.contains("witness: σ:0 σ:0"), "stdout: {text}");
}

#[test]
fn check_contained_exits_0() {
    let out = gra(&["check", &fixture("lad.gra"), &fixture("lad.gra")]);
    assert_eq!(exit_code(&out), 0);
    assert!(stdout(&out).contains("CONTAINED"));
    // The bounded pre-check leaves a caveat on stderr.
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("unambiguity"), "stderr: {err}");
}

#[test]
fn check_json_schema() {
    let out = gra(&[
        "check",
        "--json",
        &fixture("universal.gra"),
        &fixture("lad.gra"),
    ]);
    assert_eq!(exit_code(&out), 1);
    let v: Value = serde_json::from_str(stdout(&out).trim()).expect("valid JSON");
    assert_eq!(v["contained"], json!(false));
    assert_eq!(
        v["witness"],
        json!([{"tag": "σ", "datum": 0}, {"tag": "σ", "datum": 0}])
    );
    assert_eq!(v["witness_verified"], json!(true));
    assert!(v["explored_states"].as_u64().unwrap() > 0);

    let out = gra(&["check", "--json", &fixture("lad.gra"), &fixture("lad.gra")]);
    assert_eq!(exit_code(&out), 0);
    let v: Value = serde_json::from_str(stdout(&out).trim()).expect("valid JSON");
    assert_eq!(v, json!({"contained": true}));
}

#[test]
fn check_rejects_ambiguous_b_unless_assumed() {
    let out = gra(&["check", &fixture("lad.gra"), &fixture("ambiguous.gra")]);
    assert_eq!(exit_code(&out), 2);
    let out = gra(&[
        "check",
        "--assume-unambiguous",
        &fixture("lad.gra"),
        &fixture("ambiguous.gra"),
    ]);
    // With the pre-check suppressed the query itself runs (lad over {σ} can
    // never be inside a language over {a}).
    assert_eq!(exit_code(&out), 1);
}

#[test]
fn check_rejects_multi_register_b() {
    let out = gra(&["check", &fixture("lad.gra"), &fixture("two_registers.gra")]);
    assert_eq!(exit_code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("register"));
}

#[test]
fn member_answers_true_and_false() {
    let out = gra(&["member", &fixture("lad.gra"), "σ:1 σ:2 σ:2 σ:3"]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(stdout(&out).trim(), "true");

    let out = gra(&["member", &fixture("lad.gra"), "σ:1 σ:2 σ:1"]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(stdout(&out).trim(), "false");

    let out = gra(&["member", &fixture("lad.gra"), ""]);
    assert_eq!(stdout(&out).trim(), "false");
}

#[test]
fn member_rejects_unknown_tags_and_bad_words() {
    let out = gra(&["member", &fixture("lad.gra"), "x:1"]);
    assert_eq!(exit_code(&out), 2);
    let out = gra(&["member", &fixture("lad.gra"), "σ:abc"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn trace_prints_one_configuration_per_letter() {
    let out = gra(&["trace", &fixture("lad.gra"), "σ:1 σ:2 σ:3"]);
    assert_eq!(exit_code(&out), 0);
    let lines: Vec<Value> = stdout(&out)
        .lines()
        .map(|l| serde_json::from_str(l).expect("JSON line"))
        .collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(
        lines[0],
        json!({"rows": {"l1": {"kind": "cofinite", "data": [1], "bot": false}}})
    );
    assert_eq!(
        lines[2],
        json!({"rows": {
            "l1": {"kind": "cofinite", "data": [1, 2, 3], "bot": false},
            "l2": {"kind": "finite", "data": [3], "bot": false},
        }})
    );
}

#[test]
fn unambiguous_fixture_verdicts() {
    let out = gra(&["unambiguous", &fixture("lad.gra"), "--bound", "4", "--domain", "6"]);
    assert_eq!(exit_code(&out), 0);
    assert!(stdout(&out).contains("no violation"));

    let out = gra(&["unambiguous", &fixture("ambiguous.gra")]);
    assert_eq!(exit_code(&out), 1);
    let text = stdout(&out);
    assert!(text.contains("ambiguous on word"), "stdout: {text}");
    assert!(text.contains("run 1:") && text.contains("run 2:"), "stdout: {text}");
}

#[test]
fn fuzz_emits_json_lines_and_exits_0() {
    let out = gra(&["fuzz", "--instances", "5", "--seed", "7"]);
    assert_eq!(exit_code(&out), 0);
    let lines: Vec<Value> = stdout(&out)
        .lines()
        .map(|l| serde_json::from_str(l).expect("JSON line"))
        .collect();
    assert_eq!(lines.len(), 5);
    for line in &lines {
        assert!(line["seed"].is_u64());
        assert_eq!(line["oracleAgrees"], json!(true));
        match line["verdict"].as_str().unwrap() {
            "contained" => assert!(line.get("witnessLength").is_none()),
            "not_contained" => assert!(line["witnessLength"].is_u64()),
            v => panic!("unexpected verdict {v}"),
        }
    }
}

#[test]
fn parse_errors_exit_2() {
    let out = gra(&["member", &fixture("missing.gra"), "σ:1"]);
    assert_eq!(exit_code(&out), 2);
    let out = gra(&["trace", &fixture("two_registers.gra"), "a:1"]);
    assert_eq!(exit_code(&out), 2);
}
