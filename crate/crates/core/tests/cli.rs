use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jetwronsk")).args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> (i32, Value) {
    let out = run(args);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}"));
    (out.status.code().unwrap(), v)
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("jetwronsk-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn diff_golden() {
    let (code, v) = report(&["--no-timing", "diff", "--expr", "z1*z2", "--p", "1", "--n", "2", "--k", "1"]);
    assert_eq!(code, 0);
    assert_eq!(
        v,
        json!({
            "schema": "jetwronsk/1",
            "command": "diff",
            "inputs": {"expr": "z1*z2", "p": 1, "n": 2, "k": 1},
            "results": {"derivative": "z1'*z2 + z1*z2'"},
            "checks": {},
            "seed": null,
            "status": "pass"
        })
    );
}

#[test]
fn timing_is_last_and_optional() {
    let (_, v) = report(&["diff", "--expr", "z1", "--p", "1"]);
    assert_eq!(v.as_object().unwrap().keys().next_back().unwrap(), "timing");
    let (_, v) = report(&["--no-timing", "diff", "--expr", "z1", "--p", "1"]);
    assert!(v.get("timing").is_none());
}

#[test]
fn input_file_with_flag_override() {
    let path = scratch("diff.json", r#"{"expr": "z1^2", "p": 2, "k": 2}"#);
    let (code, v) = report(&["--no-timing", "diff", "--input", path.to_str().unwrap(), "--p", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["inputs"]["p"], 1);
    assert_eq!(v["inputs"]["k"], 2);
    assert_eq!(v["results"]["derivative"], "2*z1'*z1");
}

#[test]
fn input_file_errors_are_usage_errors() {
    let unknown = scratch("unknown.json", r#"{"expr": "z1", "bogus": 1}"#);
    assert_eq!(run(&["diff", "--input", unknown.to_str().unwrap()]).status.code(), Some(2));
    let broken = scratch("broken.json", "{ not json");
    assert_eq!(run(&["diff", "--input", broken.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["diff", "--input", "/nonexistent/x.json"]).status.code(), Some(2));
}

#[test]
fn family_from_input_file() {
    let path = scratch(
        "family.json",
        r#"{"n": 2, "k": 1, "delta": 1, "r": 1, "tau": ["z1 + 1", "z2 + 2"],
            "a": {"(1,0)": "z2 + 1", "(0,1)": "-1/4"}, "x": "0,0"}"#,
    );
    let (code, v) = report(&["--no-timing", "incidence", "--input", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["checks"]["incidence"]["pass"], true);
    let (code, v) = report(&["--no-timing", "incidence", "--input", path.to_str().unwrap(), "--perturb", "2"]);
    assert_eq!(code, 1);
    assert_eq!(v["status"], "fail");
}

#[test]
fn plucker_golden() {
    let (code, v) = report(&["--no-timing", "plucker", "--matrix", "1,0,2;0,1,3"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["coordinates"], json!({"(0,1)": "1", "(0,2)": "3", "(1,2)": "-2"}));
    assert_eq!(v["results"]["rank"], 2);
    let (_, v) = report(&["--no-timing", "plucker", "--matrix", "1,2;2,4"]);
    assert_eq!(v["results"]["degenerate"], true);
}

#[test]
fn germ_on_circle() {
    let (code, v) = report(&["--no-timing", "germ", "--f", "z1^2 + z2^2 - 1", "--x", "1,0", "--k", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["gamma"], json!(["1 - 1/2*t^2 + O(t^3)", "t + O(t^3)"]));
    assert_eq!(v["results"]["jet"]["z1''"], "-1");
}

#[test]
fn wronskian_of_monomials() {
    let (code, v) = report(&["--no-timing", "wronskian", "--f", "1;z1", "--k", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["wronskian"], "z1'");
    assert_eq!(v["results"]["weight"], 1);
}

#[test]
fn bounds_deng_two() {
    let (code, v) = report(&["--no-timing", "bounds", "--deng", "--n", "2"]);
    assert_eq!(code, 0, "{v}");
    let text = v["results"].to_string();
    assert!(text.contains("12338") && text.contains("59049"), "{text}");
}

#[test]
fn csv_lists_checks() {
    let out = run(&["--format", "csv", "--no-timing", "verify", "--suite", "bounds", "--trials", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("check,pass,failures"));
    assert!(lines.clone().count() >= 3);
    assert!(lines.all(|l| l.split(',').nth(1) == Some("true")));
}

#[test]
fn parse_errors_exit_two() {
    assert_eq!(run(&["diff", "--expr", "z1 +", "--p", "1"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["plucker", "--matrix", "1,2;3"]).status.code(), Some(2));
}
