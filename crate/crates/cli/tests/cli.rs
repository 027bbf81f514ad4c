use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_powercast"))
}

fn write(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("powercast-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> (i32, Value, String) {
    let Output { status, stdout, stderr } = bin().args(args).output().unwrap();
    let text = String::from_utf8(stdout).unwrap();
    let json = serde_json::from_str(&text).unwrap_or(Value::Null);
    (status.code().unwrap(), json, String::from_utf8(stderr).unwrap())
}

const LINE: &str = r#"{"kind":"line","positions":["0","4","8"]}"#;
const STAR: &str = r#"{"kind":"tree","nodes":["c","l1","l2","l3"],
  "edges":[{"u":"c","v":"l1","w":"1"},{"u":"c","v":"l2","w":"2"},{"u":"c","v":"l3","w":"3"}],
  "agents":[{"id":1,"node":"l1"},{"id":2,"node":"l2"},{"id":3,"node":"l3"}]}"#;

#[test]
fn line_convergecast_reports_the_optimum() {
    let f = write("line.json", LINE);
    let (code, out, _) = run(&["line-convergecast", f.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(out["optimal_power"], "3");
    assert_eq!(out["split"], 1);
    assert_eq!(out["invocation"]["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn decide_below_optimum_exits_one() {
    let f = write("line.json", LINE);
    let (code, out, _) = run(&["decide", "--mode", "conv", "--power", "29/10", f.to_str().unwrap()]);
    assert_eq!((code, out["feasible"].clone()), (1, Value::Bool(false)));
    let (code, out, _) = run(&["decide", "--mode", "bcast", "--source", "1", "--power", "3", f.to_str().unwrap()]);
    assert_eq!((code, out["feasible"].clone()), (0, Value::Bool(true)));
}

#[test]
fn usage_and_parse_errors_exit_two() {
    let (code, _, err) = run(&["decide", "--power", "3"]);
    assert_eq!(code, 2);
    assert!(err.contains("Usage"));
    let bad = write("bad.json", r#"{"kind":"line","positions":["0","0"]}"#);
    assert_eq!(run(&["line-convergecast", bad.to_str().unwrap()]).0, 2);
    assert_eq!(run(&["line-convergecast", "/nonexistent.json"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
}

#[test]
fn decimal_display() {
    let f = write("line018.json", r#"{"kind":"line","positions":["0","1","8"]}"#);
    let (_, out, _) = run(&["--decimal", "2", "line-convergecast", f.to_str().unwrap()]);
    assert_eq!(out["optimal_power"], "3.50");
}

#[test]
fn simulate_star() {
    let t = write("star.json", STAR);
    let (code, out, _) = run(&["simulate", "--tree", t.to_str().unwrap(), "--algorithm", "unknown-tree", "--budget", "10"]);
    assert_eq!(code, 0);
    assert_eq!(out["achieved"], true);
    let (_, out, _) = run(&["simulate", t.to_str().unwrap(), "--algorithm", "unknown-tree"]);
    assert_eq!((out["budget"].clone(), out["max_power"].clone()), ("4".into(), "5/2".into()));
    let (code, _, _) = run(&["simulate", t.to_str().unwrap(), "--algorithm", "unknown-tree", "--budget", "1"]);
    assert_eq!(code, 1);
    let (code, out, _) =
        run(&["simulate", t.to_str().unwrap(), "--algorithm", "dist-broadcast", "--source", "3", "--trace"]);
    assert_eq!(code, 0);
    assert!(out["events"].as_array().is_some_and(|e| !e.is_empty()));
}

#[test]
fn graph_approx_both_modes() {
    let t = write("star.json", STAR);
    let (code, out, _) = run(&["graph-approx", "--mode", "conv", t.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!((out["separation"].clone(), out["max_power"].clone()), ("4".into(), "4".into()));
    let (code, out, _) = run(&["graph-approx", "--mode", "bcast", "--source", "2", t.to_str().unwrap()]);
    assert_eq!((code, out["verified"].clone()), (0, Value::Bool(true)));
}

#[test]
fn emitted_strategy_verifies() {
    let f = write("line.json", LINE);
    let (_, out, _) = run(&["line-convergecast", "--strategy", f.to_str().unwrap()]);
    let s = write("strategy.json", &out["strategy"].to_string());
    let args = |budget: &'static str| {
        vec!["verify".to_string(), f.to_str().unwrap().into(), "--strategy".into(), s.to_str().unwrap().into(), "--budget".into(), budget.into()]
    };
    let (code, out, _) = run(&args("3").iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!((code, out["valid"].clone()), (0, Value::Bool(true)));
    let (code, out, _) = run(&args("2999/1000").iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!((code, out["valid"].clone()), (1, Value::Bool(false)));
}

#[test]
fn generators_feed_back_into_solvers() {
    let (code, doc, _) = run(&["gen", "line", "--n", "12", "--seed", "3"]);
    assert_eq!(code, 0);
    let f = write("gen-line.json", &doc.to_string());
    assert_eq!(run(&["line-convergecast", f.to_str().unwrap()]).0, 0);
    assert_eq!(run(&["gen", "line", "--n", "12", "--seed", "3"]).1, doc);

    let (_, doc, _) = run(&["gen", "tree", "--n", "30", "--seed", "4"]);
    let t = write("gen-tree.json", &doc.to_string());
    assert_eq!(run(&["simulate", t.to_str().unwrap(), "--algorithm", "unknown-tree"]).0, 0);

    let (code, doc, err) = run(&["gen", "star", "--mode", "bcast", "--values", "6,7,7"]);
    assert_eq!(code, 0);
    assert!(err.contains("power 81"));
    assert_eq!(doc["edges"].as_array().unwrap().len(), 5);
    assert_eq!(run(&["gen", "star", "--mode", "conv", "--values", "5,7,8"]).0, 2);

    let (_, doc, _) = run(&["gen", "lower-bound", "--delta", "1/2", "--power", "8"]);
    assert_eq!(doc["positions"].as_array().unwrap().len(), 50);
    let f = write("lb.json", &doc.to_string());
    assert_eq!(run(&["decide", "--mode", "conv", "--power", "8", f.to_str().unwrap()]).0, 0);
}

#[test]
fn bench_suites_report_rows_in_order() {
    let (code, out, _) = run(&["bench", "--suite", "oracle-equivalence", "--seeds", "12", "--jobs", "2"]);
    assert_eq!((code, out["failures"].clone()), (0, 0.into()));
    let idx: Vec<u64> = out["rows"].as_array().unwrap().iter().map(|r| r["index"].as_u64().unwrap()).collect();
    assert_eq!(idx, (0..12).collect::<Vec<_>>());
    let (code, out, _) = run(&["bench", "--suite", "distributed-bounds", "--seeds", "5"]);
    assert_eq!((code, out["instances"].clone()), (0, 5.into()));
    let out = bin().args(["bench", "--suite", "scaling", "--sizes", "10,50", "--format", "csv"]).output().unwrap();
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("index,size,wall_ms,ok\n0,10,"));
}
