use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_forest-delta"))
        .args(args)
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("forest-delta-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn decide_exit_codes() {
    let ok = run(&["decide", "--fixture", "F1"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["definable"], true);

    let bad = run(&["decide", "--fixture", "F2", "--lift"]);
    assert_eq!(bad.status.code(), Some(1));
    let v = json(&bad);
    assert_eq!(v["definable"], false);
    assert_eq!(v["counterexample"]["n"], 1);

    let desc = run(&["decide", "--fixture", "F6", "--order", "desc"]);
    assert_eq!(desc.status.code(), Some(1));
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["decide", "--fixture", "F2", "--lift"][..],
        &["pieces", "--fixture", "F1"],
        &["syntactic", "--fixture", "F1-dup"],
        &["corpus", "run"],
    ] {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.status.code(), b.status.code());
    }
}

#[test]
fn corpus_run_and_filter() {
    let all = run(&["corpus", "run"]);
    assert_eq!(all.status.code(), Some(0));

    let one = run(&["corpus", "run", "--only", "F4"]);
    assert_eq!(one.status.code(), Some(0));
    let rows = json(&one)["rows"].as_array().unwrap().clone();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r["entry"] == "F4"));

    let none = run(&["corpus", "run", "--only", "nonexistent"]);
    assert_eq!(none.status.code(), Some(2));
    assert!(!none.stderr.is_empty());
}

#[test]
fn flipped_expectation_fails_the_run() {
    let mut entry: Value = serde_json::from_str(include_str!("../corpus/f1.json")).unwrap();
    entry["expected"][0]["definable"] = Value::Bool(false);
    let path = scratch("flipped.json", &entry.to_string());
    let out = run(&["corpus", "run", "--file", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let rows = json(&out)["rows"].as_array().unwrap().clone();
    assert!(rows.iter().any(|r| r["match"] == false));
}

#[test]
fn bad_input_exits_2() {
    assert_eq!(
        run(&["member", "--fixture", "F1", "--forest", "b(("])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["decide", "--fixture", "nope"]).status.code(), Some(2));
    assert_eq!(
        run(&["decide", "--fixture", "F1", "--order", "sideways"])
            .status
            .code(),
        Some(2)
    );
    let path = scratch("broken.json", "{ not json");
    assert_eq!(
        run(&["decide", "--spec", path.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn no_minimize_warns() {
    let out = run(&["decide", "--fixture", "F1", "--no-minimize"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!json(&out)["warnings"].as_array().unwrap().is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("minimization skipped"));
}

#[test]
fn member_and_eval() {
    let m = json(&run(&["member", "--fixture", "F1", "--forest", "b(a)+b"]));
    assert_eq!(m["member"], true);
    let m = json(&run(&["member", "--fixture", "F1", "--forest", "b(b)"]));
    assert_eq!(m["member"], false);

    let e = json(&run(&["eval", "--formula", "E x a(x)", "--forest", "b(b)"]));
    assert_eq!(e["value"], false);
    assert_eq!(e["class"], "Sigma1");
}

#[test]
fn synth_word() {
    let out = run(&["synth-word", "--fixture", "F5", "--target", "z"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        json(&out)["text"],
        "{a,b}* {b} {a,b}* {b} {a,b}* {b} {a,b}*"
    );

    let not_da = run(&["synth-word", "--fixture", "F4", "--target", "a"]);
    assert_eq!(not_da.status.code(), Some(1));
    assert_eq!(json(&not_da)["witness"], serde_json::json!(["a", "b"]));
}

#[test]
fn counterexample_search() {
    assert_eq!(
        run(&["counterexample", "--fixture", "F2"]).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&["counterexample", "--fixture", "F1", "--exhaustive"])
            .status
            .code(),
        Some(0)
    );
}
