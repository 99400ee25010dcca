use std::process::{Command, Output};

fn alba(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_alba")).args(args).env("ALBA_SEED", "7").output().expect("spawn alba")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn classify_reports_tame_and_restricted() {
    let o = alba(&["classify", "f(p) <= g(p)"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("tame inductive") && s.contains("restricted inductive"), "{s}");
}

#[test]
fn classify_reports_non_recursive() {
    let o = alba(&["classify", "g(f(p)) <= f(g(p))"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("not recursive"));
}

#[test]
fn classify_json_is_parseable() {
    let o = alba(&["classify", "--format", "json", "mu X. (p \\/ f(X)) <= g(p)"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v.is_object());
}

#[test]
fn malformed_input_exits_2() {
    assert_eq!(alba(&["classify", "f(p <= "]).status.code(), Some(2));
    assert_eq!(alba(&["reduce", "--mode", "sideways", "f(p) <= g(p)"]).status.code(), Some(2));
    assert_eq!(alba(&["reduce", "--epsilon", "p=7", "f(p) <= g(p)"]).status.code(), Some(2));
}

#[test]
fn reduce_golden_outputs() {
    let o = alba(&["reduce", "f(p) <= g(p)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "j1 <= m1 => f(j1) <= g(m1)");

    let o = alba(&["reduce", "--mode", "proper", "--pivotal", "mu X. (p \\/ f(X)) <= g(p)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "j1 <= m1 => mu* X. (j1 \\/ f(X)) <= g(m1)");

    let o = alba(&["reduce", "--mode", "tame", "f(p) \\/ (nu X. g(X)) <= g(p)"]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert_eq!(lines, ["j1 <= m1 => f(j1) <= g(m1)", "=> nu* X. g(X) <= g(bot)"]);
}

#[test]
fn tame_mode_fails_on_restricted_only_input() {
    let o = alba(&["reduce", "--mode", "tame", "mu X. (p \\/ f(X)) <= g(p)"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("tame restriction"));
}

#[test]
fn verify_golden_is_equivalent() {
    let o = alba(&["verify", "--max-size", "5", "--budget", "6", "mu X. (p \\/ f(X)) <= g(p)"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("equivalent on all"));
}

#[test]
fn verify_detects_corrupted_trace() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.json");
    let o = alba(&["reduce", "--format", "json", "--trace", "f(p) <= g(p)"]);
    assert_eq!(o.status.code(), Some(0));
    let mut trace: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();

    std::fs::write(&path, serde_json::to_string(&trace).unwrap()).unwrap();
    let ok = alba(&["verify", "--max-size", "5", "--budget", "6", "--from-trace", path.to_str().unwrap(), "f(p) <= g(p)"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));

    trace["output"] = serde_json::json!(["j1 <= m1 => f(j1) <= g(bot)"]);
    std::fs::write(&path, serde_json::to_string(&trace).unwrap()).unwrap();
    let bad = alba(&["verify", "--max-size", "5", "--budget", "6", "--from-trace", path.to_str().unwrap(), "f(p) <= g(p)"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("witness:"), "{}", stdout(&bad));
}

#[test]
fn verify_against_single_algebra_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("alg.json");
    std::fs::write(&path, ALG).unwrap();
    let o = alba(&["verify", "--alg", path.to_str().unwrap(), "f(p) <= g(p)"]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("all 1 algebras"));
}

const ALG: &str = r#"{"name": "c3", "elements": ["0", "a", "1"], "covers": [["0", "a"], ["a", "1"]], "operations": {"f": ["0", "a", "a"], "g": ["a", "a", "1"]}}"#;
