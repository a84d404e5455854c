use std::process::{Command, Output};

use serde_json::Value;

fn premagnus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_premagnus"))
        .args(args)
        .env_remove("MAGNUS_MAX_ORDER")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn gl_log_order_two() {
    let v = json(&premagnus(&["magnus", "gl-log", "--order", "2"]));
    assert_eq!(v["command"], "magnus gl-log");
    assert_eq!(v["payload"], serde_json::json!([{"elem": "o(o)", "coeff": "-1/2"}]));
    assert_eq!(v["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn e1_enumeration() {
    let v = json(&premagnus(&["trees", "enum", "--order", "5", "--e1"]));
    assert_eq!(v["payload"]["count"], 10);
    let all = json(&premagnus(&["trees", "enum", "--order", "4"]));
    assert_eq!(all["payload"]["count"], 5);
}

#[test]
fn output_is_deterministic() {
    let args = ["magnus", "nonplanar", "--order", "5"];
    let a = premagnus(&args);
    let b = premagnus(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let other = json(&premagnus(&["magnus", "nonplanar", "--order", "4"]));
    assert_ne!(json(&a)["config_hash"], other["config_hash"]);
}

#[test]
fn routes_agree_on_the_command_line() {
    let p = |cmd: &str| json(&premagnus(&["magnus", cmd, "--order", "5"]))["payload"].clone();
    assert_eq!(p("recursion"), p("gl-log"));
    assert_eq!(p("recursion"), p("nonplanar"));
}

#[test]
fn verify_all_passes() {
    let out = premagnus(&["verify", "all", "--max-order", "5"]);
    let v = json(&out);
    assert_eq!(v["payload"]["passed"], v["payload"]["total"]);
}

#[test]
fn lie_and_blanes_tables() {
    let v = json(&premagnus(&["magnus", "lie", "--order", "3"]));
    assert_eq!(v["payload"]["text"], "-1/4 [a1,a2] + 1 a3");
    assert_eq!(v["payload"]["terms"][0]["lambda"], serde_json::json!({"1": 1, "2": 1}));
    let out = premagnus(&["magnus", "blanes", "--k", "6", "--cap", "7", "--format", "text"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "-1/30240 [q1,[q1,[q1,[q1,[q1,q2]]]]]");
}

#[test]
fn integrate_emits_csv_then_summary() {
    let out = premagnus(&["integrate", "--order", "4", "--steps", "8", "--problem", "non-commuting"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,norm,det");
    assert_eq!(lines.len(), 1 + 9 + 1);
    for row in &lines[1..10] {
        let det: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
        assert!((det - 1.0).abs() < 1e-8);
    }
    let summary: Value = serde_json::from_str(lines[10]).unwrap();
    let slope = summary["payload"]["slope"].as_f64().unwrap();
    assert!((3.7..=4.5).contains(&slope), "{slope}");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["magnus", "recursion", "--order", "0"][..],
        &["magnus", "recursion", "--order", "8"],
        &["integrate", "--order", "3", "--steps", "4", "--problem", "airy"],
        &["integrate", "--order", "4", "--steps", "4", "--problem", "nope"],
        &["frobnicate"],
    ] {
        let out = premagnus(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn env_var_raises_the_cap() {
    let out = Command::new(env!("CARGO_BIN_EXE_premagnus"))
        .args(["magnus", "counts", "--order", "8"])
        .env("MAGNUS_MAX_ORDER", "8")
        .output()
        .unwrap();
    let v = json(&out);
    assert_eq!(v["payload"]["e1_count"], 211);
    let bad = Command::new(env!("CARGO_BIN_EXE_premagnus"))
        .args(["magnus", "counts", "--order", "3"])
        .env("MAGNUS_MAX_ORDER", "eleven")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
