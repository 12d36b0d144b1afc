use std::process::Command;

use serde_json::Value;

fn sumprod(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_sumprod")).args(args).output().expect("binary runs");
    let text = String::from_utf8(out.stdout).expect("utf-8 output");
    let json = serde_json::from_str(&text).unwrap_or_else(|e| panic!("not json ({e}): {text}"));
    (out.status.code().expect("exit code"), json)
}

fn no_floats(v: &Value) -> bool {
    match v {
        Value::Number(n) => !n.is_f64(),
        Value::Array(a) => a.iter().all(no_floats),
        Value::Object(m) => m.values().all(no_floats),
        _ => true,
    }
}

fn strip_elapsed(mut v: Value) -> Value {
    v["stats"]["elapsed_ms"] = Value::Null;
    v
}

#[test]
fn identities_report_every_suite() {
    let (code, v) = sumprod(&["verify-identities", "--seed", "7", "--cases", "1000"]);
    assert_eq!(code, 0);
    let names: Vec<&str> = v["witness"].as_array().unwrap().iter().map(|s| s["name"].as_str().unwrap()).collect();
    for s in ["basic-identity", "commutator", "closed", "homomorph", "composition-law"] {
        assert!(names.contains(&s), "missing {s}");
    }
    assert!(v["witness"].as_array().unwrap().iter().all(|s| s["passed"] == s["cases"]));
}

#[test]
fn schur_threshold() {
    let (code, v) = sumprod(&["search", "schur", "--r", "2", "--mode", "threshold"]);
    assert_eq!(code, 0);
    assert_eq!(v["witness"]["value"], 5);
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn hindman_parity() {
    let (code, v) = sumprod(&["hindman", "--k", "2", "--coloring", r#"{"kind":"val2_parity"}"#]);
    assert_eq!(code, 0);
    let x: Vec<&str> = v["witness"]["witness"]["x"].as_array().unwrap().iter().map(|s| s.as_str().unwrap()).collect();
    assert!(x == ["1", "1/3"] || x == ["1", "3"], "{x:?}");
    assert!(no_floats(&v));
}

#[test]
fn constructive_route() {
    let (code, v) = sumprod(&["hindman", "--k", "2", "--route", "constructive"]);
    assert_eq!(code, 0);
    assert_eq!(v["witness"]["witness"]["x"], serde_json::json!(["1", "3"]));
}

#[test]
fn not_found_exits_one() {
    let (code, v) = sumprod(&["hindman", "--k", "2", "--height", "2", "--route", "direct"]);
    assert_eq!(code, 1);
    assert_eq!(v["found"], false);
    assert!(v["witness"]["best_partial"].is_object());
}

#[test]
fn invalid_input_exits_two() {
    let (code, v) = sumprod(&["hindman", "--coloring", "{\"kind\":\"nope\"}"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "parse");
    let (code, v) = sumprod(&["frobnicate"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "usage");
    let (code, _) = sumprod(&["build", "--q", "0"]);
    assert_eq!(code, 2);
}

#[test]
fn consistency_check() {
    let (code, _) = sumprod(&["consistency", "--v", "2,1", "--families", "lower"]);
    assert_eq!(code, 0);
    let (code, v) = sumprod(&["consistency", "--v", "1,1", "--families", "lower"]);
    assert_eq!(code, 1);
    assert!(v["witness"]["failing"]["1"].is_string());
}

#[test]
fn build_full() {
    let (code, v) = sumprod(&["build", "--n", "3", "--mode", "full"]);
    assert_eq!(code, 0);
    assert_eq!(v["witness"]["v"].as_array().unwrap().len(), 3);
}

#[test]
fn deterministic_across_job_counts() {
    let a = sumprod(&["hindman", "--k", "2", "--seed", "3", "--coloring", r#"{"kind":"random","r":2,"seed":3}"#]);
    let b = sumprod(&["hindman", "--k", "2", "--seed", "3", "--coloring", r#"{"kind":"random","r":2,"seed":3}"#, "--jobs", "1"]);
    assert_eq!(a.0, b.0);
    let mut bj = strip_elapsed(b.1);
    bj["params"].as_object_mut().unwrap().remove("jobs");
    assert_eq!(strip_elapsed(a.1), bj);
    let c = sumprod(&["build", "--n", "3", "--q", "1,2"]);
    let d = sumprod(&["build", "--n", "3", "--q", "1,2"]);
    assert_eq!(strip_elapsed(c.1), strip_elapsed(d.1));
}

#[test]
fn thresholds_command() {
    let (code, v) = sumprod(&["thresholds"]);
    assert_eq!(code, 0);
    assert_eq!(v["witness"]["schur_r2"]["value"], 5);
    assert_eq!(v["witness"]["vdw_k3_r2"]["value"], 9);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}
