//! End-to-end runs of the `biasflow` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_biasflow"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(bytes)))
}

fn ok_json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    json(&out.stdout)
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

fn cluster_values(v: &Value) -> Vec<f64> {
    v["groups"].as_array().unwrap().iter().map(|g| f(&g["value"])).collect()
}

fn simulate(name: &str, dir: &Path) -> Value {
    let csv = dir.join(format!("{name}.csv"));
    ok_json(&["simulate", scenario(name).to_str().unwrap(), "--out", csv.to_str().unwrap()])
}

fn write_scenario(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

const K2_BAD_WEIGHT: &str = r#"{
  "graph": {"n": 2, "edges": [{"from": 1, "to": 2, "weight": -1.0}]},
  "x0": [0.0, 0.0],
  "b": [1.0, -1.0],
  "sim": {"t_end": 1.0, "dt": 0.1}
}"#;

#[test]
fn analyze_balanced_k2() {
    let r = ok_json(&["analyze", scenario("k2_balanced.json").to_str().unwrap()]);
    assert_eq!(r["stable"], true);
    assert_eq!(r["special_case"]["kind"], "undirected_sum");
    let x: Vec<f64> = r["x_bar"].as_array().unwrap().iter().map(f).collect();
    assert!((x[0] - 0.5).abs() < 1e-12 && (x[1] + 0.5).abs() < 1e-12);
    assert!(r.get("drift").is_none());
}

#[test]
fn analyze_drifting_k2() {
    let r = ok_json(&["analyze", scenario("k2_drift.json").to_str().unwrap()]);
    assert_eq!(r["stable"], false);
    assert!(r.get("x_bar").is_none());
    assert!((f(&r["drift"][0]["slope"]) - 1.0).abs() < 1e-12);
}

#[test]
fn analyze_six_agent_reconstruction() {
    let r = ok_json(&["analyze", scenario("polarisation.json").to_str().unwrap()]);
    assert_eq!(r["approximate_topology"], true);
    assert_eq!(r["special_case"]["kind"], "globally_reachable");
    let x: Vec<f64> = r["x_bar"].as_array().unwrap().iter().map(f).collect();
    let want = [-10.0, 10.0, 10.0, -10.0, 10.0, -10.0];
    assert!(x.iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-9), "{x:?}");
}

#[test]
fn simulated_clusters() {
    let dir = tempfile::tempdir().unwrap();
    let s = simulate("polarisation.json", dir.path());
    let v = cluster_values(&s["clusters"]);
    assert_eq!(v.len(), 2);
    assert!((v[0] + 10.0).abs() < 1e-6 && (v[1] - 10.0).abs() < 1e-6);

    let s = simulate("clustering.json", dir.path());
    let v = cluster_values(&s["clusters"]);
    assert_eq!(v.len(), 4);
    for (a, b) in v.iter().zip([-14.0, 1.0, 6.0, 11.0]) {
        assert!((a - b).abs() < 1e-6, "{v:?}");
    }

    let s = simulate("consensus.json", dir.path());
    let v = cluster_values(&s["clusters"]);
    assert_eq!(v.len(), 1);
    assert!((v[0] - 2.0).abs() < 1e-9);
    assert!(s["conservation_errors"].as_array().unwrap().iter().all(|e| f(e) < 1e-6));
}

#[test]
fn trajectory_csv_layout() {
    let dir = tempfile::tempdir().unwrap();
    let s = simulate("k2_balanced.json", dir.path());
    let text = std::fs::read_to_string(dir.path().join("k2_balanced.json.csv")).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rdr.headers().unwrap(), vec!["t", "x1", "x2"]);
    let rows: Vec<Vec<f64>> = rdr
        .records()
        .map(|r| r.unwrap().iter().map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len() as u64, s["samples"].as_u64().unwrap());
    assert_eq!(rows[0], vec![0.0, 0.0, 0.0]);
    let last = rows.last().unwrap();
    assert_eq!(last[0], 10.0);
    // values round-trip exactly
    assert_eq!(last[1], f(&s["final_state"][0]));
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut runs = Vec::new();
    for k in 0..2 {
        let csv = dir.path().join(format!("run{k}.csv"));
        let summary = dir.path().join(format!("run{k}.json"));
        let out = run(&[
            "simulate",
            scenario("clustering.json").to_str().unwrap(),
            "--out",
            csv.to_str().unwrap(),
            "--summary",
            summary.to_str().unwrap(),
            "--engine",
            "rk4",
        ]);
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
        let analysis = run(&["analyze", scenario("clustering.json").to_str().unwrap()]).stdout;
        runs.push((std::fs::read(csv).unwrap(), std::fs::read(summary).unwrap(), analysis));
    }
    assert!(runs[0] == runs[1]);
}

#[test]
fn design_two_stage_from_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let sched = dir.path().join("schedule.json");
    let r = ok_json(&[
        "design",
        scenario("k2_two_stage.json").to_str().unwrap(),
        "--out",
        sched.to_str().unwrap(),
    ]);
    assert_eq!(r["schedule"]["kind"], "two_stage");
    assert!(f(&r["verification"]["error_inf"]) < 1e-3);
    assert!(f(&r["verification"]["handoff_error"]) < 1e-6);
    let written = json(&std::fs::read(sched).unwrap());
    assert_eq!(written, r["schedule"]);
    assert_eq!(written["segments"][1]["end"], Value::Null);
}

#[test]
fn design_flags_override_scenario() {
    // negative first entry must not be taken for a flag
    let r = ok_json(&[
        "design",
        scenario("k2_balanced.json").to_str().unwrap(),
        "--x-d",
        "-2,4",
        "--t-bar",
        "0.5",
    ]);
    assert_eq!(r["schedule"]["t_bar"], 0.5);
    let x: Vec<f64> = r["verification"]["final_state"].as_array().unwrap().iter().map(f).collect();
    assert!((x[0] + 2.0).abs() < 1e-3 && (x[1] - 4.0).abs() < 1e-3);
}

#[test]
fn design_to_initial_state_is_single_stage() {
    let r = ok_json(&["design", scenario("k2_balanced.json").to_str().unwrap(), "--x-d", "0,0"]);
    assert_eq!(r["schedule"]["kind"], "single_stage");
    assert_eq!(r["schedule"]["reachable"], true);
    // u = L x0 − b
    assert_eq!(r["schedule"]["segments"][0]["u"], serde_json::json!([-1.0, 1.0]));
    assert!(f(&r["verification"]["error_inf"]) < 1e-9);
}

#[test]
fn design_on_generated_digraphs() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..5u64 {
        let path = dir.path().join(format!("gen{seed}.json"));
        let out = run(&["gen", "--seed", &seed.to_string(), "--n", "8", "--out", path.to_str().unwrap()]);
        assert!(out.status.success());
        let target = (1..=8).map(|i| format!("{}", (i as f64) * 1.5 - 6.0)).collect::<Vec<_>>().join(",");
        let r = ok_json(&["design", path.to_str().unwrap(), "--x-d", &target]);
        assert!(f(&r["verification"]["error_inf"]) < 1e-3, "seed {seed}: {r}");
    }
}

#[test]
fn gen_is_reproducible() {
    let a = run(&["gen", "--seed", "42"]).stdout;
    let b = run(&["gen", "--seed", "42"]).stdout;
    let c = run(&["gen", "--seed", "43"]).stdout;
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert_eq!(json(&a)["graph"]["n"], 8);
}

fn assert_error(out: &Output, code: i32, kind: &str) -> Value {
    assert_eq!(out.status.code(), Some(code), "{}", String::from_utf8_lossy(&out.stderr));
    let stderr = String::from_utf8(out.stderr.clone()).unwrap();
    let v = json(stderr.trim().as_bytes());
    assert_eq!(v["error"]["kind"], kind);
    assert_eq!(v["error"]["exit_code"], code);
    v
}

#[test]
fn invalid_edge_weight_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_scenario(dir.path(), "bad.json", K2_BAD_WEIGHT);
    let v = assert_error(&run(&["analyze", p.to_str().unwrap()]), 2, "validation");
    let msg = v["error"]["message"].as_str().unwrap();
    assert!(msg.contains("edge #0") && msg.contains("1 -> 2"), "{msg}");
}

#[test]
fn parse_error_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_scenario(dir.path(), "broken.json", "{\n  \"graph\": {\"n\": 2,\n  \"edges\": [}\n}");
    let v = assert_error(&run(&["analyze", p.to_str().unwrap()]), 2, "parse");
    assert_eq!(v["error"]["line"], 3);
}

#[test]
fn missing_file_exits_2() {
    assert_error(&run(&["analyze", "/nonexistent/scenario.json"]), 2, "read");
}

#[test]
fn unwritable_output_exits_1() {
    let out = run(&[
        "simulate",
        scenario("k2_balanced.json").to_str().unwrap(),
        "--out",
        "/nonexistent/dir/traj.csv",
    ]);
    assert_error(&out, 1, "write");
}

#[test]
fn usage_errors_are_json() {
    assert_error(&run(&["analyze"]), 2, "usage");
    assert_error(&run(&["simulate", "x.json", "--out", "y.csv", "--tol", "0"]), 2, "read");
    let s = scenario("k2_balanced.json");
    assert_error(
        &run(&["simulate", s.to_str().unwrap(), "--out", "/dev/null", "--tol", "0"]),
        2,
        "usage",
    );
    assert_error(&run(&["design", s.to_str().unwrap()]), 2, "usage");
    assert_error(&run(&["design", s.to_str().unwrap(), "--x-d", "1,2,3"]), 2, "validation");
    assert_error(&run(&["design", s.to_str().unwrap(), "--x-d", "3,1", "--t-bar", "0"]), 2, "validation");
}

#[test]
fn unstable_simulation_warns_but_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("drift.csv");
    let out = run(&["simulate", scenario("k2_drift.json").to_str().unwrap(), "--out", csv.to_str().unwrap()]);
    assert!(out.status.success());
    let warning = json(String::from_utf8(out.stderr).unwrap().trim().as_bytes());
    assert!(warning["warning"].is_string());
    assert_eq!(json(&out.stdout)["stable"], false);
}
