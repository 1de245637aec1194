use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_agentcast")).args(args).output().expect("spawn")
}

fn run_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_agentcast"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn");
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn tmp(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn example_delivery() {
    let o = run(&["solve", "--task", "delivery", &data("example1.json")]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["feasible"], true);
    assert_eq!(v["surplus_or_deficit"], 8);
    assert!(String::from_utf8_lossy(&o.stderr).contains("feasible"));
}

#[test]
fn two_agents_cannot_meet() {
    let o = run(&["solve", "--task", "convergecast", &data("two-agents-4-4.json")]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    assert_eq!(v["feasible"], false);
    assert_eq!(v["surplus_or_deficit"], -2);
    // the document's own task is the default
    assert_eq!(code(&run(&["solve", &data("two-agents-4-4.json")])), 1);
    assert_eq!(code(&run(&["solve", "--task", "broadcast", &data("two-agents-4-4.json")])), 1);
}

#[test]
fn partition_gadget_without_equal_split_is_infeasible() {
    let gen = run(&["gen", "partition-digraph", "--weights", "1,2"]);
    assert_eq!(code(&gen), 0);
    let o = run_stdin(&["solve", "--task", "delivery", "-"], &gen.stdout);
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stderr));
    let gen = run(&["gen", "partition-digraph", "--weights", "1,1"]);
    assert_eq!(code(&run_stdin(&["solve", "-"], &gen.stdout)), 0);
}

#[test]
fn schedules_validate_and_replay() {
    for task in ["delivery", "convergecast", "broadcast"] {
        let path = tmp(&format!("example1-{task}.json"));
        let o = run(&["schedule", "--task", task, "-o", path.to_str().unwrap(), &data("example1.json")]);
        assert_eq!(code(&o), 0, "{task}: {}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(json(&o)["feasible"], true);
        let v = run(&["validate", "--task", task, &data("example1.json"), path.to_str().unwrap()]);
        assert_eq!(code(&v), 0, "{task}");
        assert_eq!(json(&v)["task_achieved"], true);
    }
    // a convergecast schedule says nothing about a packet leaving 0 for 40
    let path = tmp("example1-convergecast.json");
    let v = run(&["validate", "--task", "delivery", &data("example1.json"), path.to_str().unwrap()]);
    assert_eq!(code(&v), 1);
}

#[test]
fn validate_accepts_schedule_output_and_reports_violations() {
    let out = tmp("wrapped.json");
    let o = run(&["schedule", "--task", "delivery", &data("example1.json")]);
    std::fs::write(&out, &o.stdout).unwrap();
    assert_eq!(code(&run(&["validate", "--task", "delivery", &data("example1.json"), out.to_str().unwrap()])), 0);

    let bad = tmp("bad.json");
    std::fs::write(&bad, r#"{"steps": [{"transfer": {"from": 1, "to": 0, "amount": 1}}]}"#).unwrap();
    let v = run(&["validate", "--task", "delivery", &data("example1.json"), bad.to_str().unwrap()]);
    assert_eq!(code(&v), 1);
    assert!(!json(&v)["violation"].is_null());
}

#[test]
fn infeasible_schedule_exits_one() {
    let o = run(&["schedule", &data("two-agents-4-4.json")]);
    assert_eq!(code(&o), 1);
    assert!(json(&o)["schedule"].is_null());
}

#[test]
fn colocated_agents_keep_their_bodies_for_broadcast() {
    let doc = data("colocated.json");
    let o = run(&["solve", "--task", "broadcast", &doc]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["witness"]["sources"], serde_json::json!([0, 2]));
    assert_eq!(code(&run(&["solve", "--task", "broadcast", "--source", "1", &doc])), 1);
    let o = run(&["oracle", "--task", "broadcast", "--resolution", "1", &doc]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["sources"], serde_json::json!([0, 2]));
    // convergecast still runs on the merged line and agrees with the search
    let solved = run(&["solve", "--task", "convergecast", &doc]);
    let searched = run(&["oracle", "--task", "convergecast", "--resolution", "1", &doc]);
    assert!(matches!(code(&solved), 0 | 1));
    assert_eq!(code(&solved), code(&searched));
    assert_eq!(code(&run(&["schedule", "--task", "broadcast", "--source", "0", &doc])), 2);
}

#[test]
fn tree_instances() {
    let doc = data("star.json");
    let o = run(&["solve", "--task", "delivery", "--source", "x", "--target", "z", "--emit-tables", &doc]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["surplus_or_deficit"], 1);
    assert_eq!(v["tables"]["edge_potentials"].as_array().unwrap().len(), 3);
    let o = run(&["schedule", "--task", "delivery", "--source", "x", "--target", "z", &doc]);
    assert_eq!(code(&o), 0);
    assert_eq!(code(&run(&["schedule", "--task", "convergecast", &doc])), 2);
    let o = run(&["solve", "--task", "convergecast", &doc]);
    assert_eq!(code(&o), 0);
    // x gathers y at c, reaches z, and can walk one unit back with z's information
    let w = &json(&o)["witness"];
    assert_eq!(w["intervals"], serde_json::json!([{ "edge": 2, "lo": 2, "hi": 3 }]));
    assert!(w["node"].is_null());
    assert_eq!(code(&run(&["solve", "--task", "delivery", "--source", "nowhere", "--target", "z", &doc])), 2);
}

#[test]
fn oracle_matches_solver_on_example() {
    let o = run(&["oracle", "--task", "delivery", "--resolution", "1", &data("example1.json")]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["surplus"], 8);
    let o = run(&["oracle", "--task", "convergecast", &data("two-agents-4-4.json")]);
    assert_eq!(code(&o), 1);
    let o = run(&["oracle", "--task", "delivery", "--max-states", "3", &data("example1.json")]);
    assert_eq!(code(&o), 2);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&run(&["solve", "/no/such/file.json"])), 2);
    assert_eq!(code(&run(&["solve", &data("example1.json")])), 2, "no task anywhere");
    assert_eq!(code(&run(&["solve", "--task", "broadcast", "--source", "9", &data("example1.json")])), 2);
    assert_eq!(code(&run(&["gen", "partition-graph", "--weights", ""])), 2);
    let o = run_stdin(&["solve", "--task", "delivery", "-"], b"{\"kind\": \"line\", \"agents\": []}");
    assert_eq!(code(&o), 2);
}

#[test]
fn generators_are_deterministic() {
    for args in [
        vec!["gen", "line", "--agents", "20", "--seed", "7"],
        vec!["gen", "tree", "--nodes", "9", "--seed", "7"],
        vec!["gen", "partition-graph", "--weights", "3,1,2"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(code(&a), 0);
        assert_eq!(a.stdout, b.stdout);
        if args[1].starts_with("partition") {
            continue;
        }
        let kind = if args[1] == "line" { "convergecast" } else { "delivery" };
        let extra: &[&str] = if args[1] == "tree" { &["--source", "n0", "--target", "n1"] } else { &[] };
        let mut solve = vec!["solve", "--task", kind];
        solve.extend_from_slice(extra);
        solve.push("-");
        let s = run_stdin(&solve, &a.stdout);
        assert!(matches!(code(&s), 0 | 1), "{args:?}: {}", String::from_utf8_lossy(&s.stderr));
    }
    let a = run(&["gen", "line", "--seed", "1"]);
    let b = run(&["gen", "line", "--seed", "2"]);
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn bench_reports_scaling() {
    let o = run(&["bench", "--sizes", "2000,20000"]);
    assert!(matches!(code(&o), 0 | 1));
    let v = json(&o);
    assert_eq!(v["runs"].as_array().unwrap().len(), 2);
    assert_eq!(v["ratios"].as_array().unwrap().len(), 1);
}
