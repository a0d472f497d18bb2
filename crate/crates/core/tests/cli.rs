use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::{json, Value};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_corrscen"));
    c.env_remove("CORRSCEN_BUDGET_NODES");
    c
}

fn run_with(mut cmd: Command, args: &[&str], stdin: &str) -> Output {
    let mut child = cmd
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn run(args: &[&str], stdin: &str) -> Output {
    run_with(bin(), args, stdin)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_of(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON output")
}

struct TempDir(PathBuf);

impl TempDir {
    fn new(tag: &str) -> Self {
        let d = std::env::temp_dir().join(format!("corrscen-cli-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&d).unwrap();
        TempDir(d)
    }

    fn write(&self, name: &str, content: &str) -> String {
        let p = self.0.join(name);
        std::fs::write(&p, content).unwrap();
        path_str(&p)
    }
}

impl Drop for TempDir {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn path_str(p: &Path) -> String {
    p.to_str().unwrap().to_string()
}

fn square_scenario() -> String {
    json!({
        "schema_version": 1,
        "measurements": [
            {"name": "a", "outcomes": 2}, {"name": "b", "outcomes": 2},
            {"name": "x", "outcomes": 2}, {"name": "y", "outcomes": 2}
        ],
        "sources": [
            {"name": "AB", "connects": ["a", "b"]}, {"name": "BY", "connects": ["b", "y"]},
            {"name": "YX", "connects": ["y", "x"]}, {"name": "XA", "connects": ["x", "a"]}
        ]
    })
    .to_string()
}

#[test]
fn pr_square_is_refuted_by_the_hardy_witness() {
    let pr = run(&["gen", "pr-box"], "");
    assert!(pr.status.success());
    let w = run(&["witness", "hardy-c4", "--dist", "-"], &stdout(&pr));
    assert_eq!(w.status.code(), Some(3));
    let r = json_of(&w);
    assert_eq!(r["verdict"], "NonClassical");
    assert!(r["chain"].as_array().unwrap().len() >= 2);
}

#[test]
fn support_search_agrees_with_the_witness() {
    let dir = TempDir::new("support");
    let scen = dir.write("c4.json", &square_scenario());
    let dist = dir.write("pr.json", &stdout(&run(&["gen", "pr-box"], "")));
    let args = [
        "search-model",
        "--scenario",
        &scen,
        "--dist",
        &dist,
        "--support",
        "--k",
        "8",
    ];
    let o = run(&args, "");
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(json_of(&o)["outcome"], "NotRealizableUpTo");
}

#[test]
fn perfect_correlation_violates_entropic_inequality() {
    let p = run(&["gen", "perfect"], "");
    let w = run(&["witness", "entropy"], &stdout(&p));
    assert_eq!(w.status.code(), Some(3));
    let slack = json_of(&w)["reports"][0]["slack"].as_f64().unwrap();
    assert!((slack - 1.0).abs() < 1e-9);
}

#[test]
fn quantum_triangle_flows() {
    let dist = run(&["gen", "quantum-c3"], "");
    assert!(dist.status.success());
    let w = run(&["witness", "chsh-c3"], &stdout(&dist));
    assert_eq!(w.status.code(), Some(3));
    assert!((json_of(&w)["slack"].as_f64().unwrap() - 0.5).abs() < 1e-9);

    let model = run(&["gen", "quantum-c3", "--as", "model"], "");
    let eval = run(&["eval", "quantum"], &stdout(&model));
    assert!(eval.status.success());
    let a = json_of(&eval)["probabilities"].clone();
    let b = json_of(&dist)["probabilities"].clone();
    let (a, b) = (a.as_array().unwrap(), b.as_array().unwrap());
    assert_eq!(a.len(), 64);
    for (x, y) in a.iter().zip(b) {
        assert!((x.as_f64().unwrap() - y.as_f64().unwrap()).abs() < 1e-12);
    }
}

#[test]
fn bell_decisions() {
    let path = run(&["gen", "pr-box", "--as", "path"], "");
    let d = run(&["decide", "p4"], &stdout(&path));
    assert_eq!(d.status.code(), Some(3));

    let dir = TempDir::new("bell");
    let local = json!({
        "schema_version": 1,
        "parties": [{"settings": 2, "outcomes": 2}, {"settings": 2, "outcomes": 2}],
        "table": [1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0]
    });
    let boxfile = dir.write("box.json", &local.to_string());
    let emb = run(
        &[
            "gen",
            "embed-bell",
            "--box",
            &boxfile,
            "--inputs",
            "1/2,1/2;1/2,1/2",
        ],
        "",
    );
    assert!(
        emb.status.success(),
        "{}",
        String::from_utf8_lossy(&emb.stderr)
    );
    let d = run(&["decide", "p4"], &stdout(&emb));
    assert_eq!(d.status.code(), Some(0));
}

#[test]
fn time_reversal_relabels_the_path_box() {
    let path = run(&["gen", "pr-box", "--as", "path"], "");
    let t = run(
        &["transform", "time-reverse", "--dist", "-"],
        &stdout(&path),
    );
    assert!(t.status.success());
    assert_eq!(json_of(&t)["variables"], json!(["a", "b", "x", "y"]));
}

#[test]
fn subset_edge_is_an_antichain_violation() {
    let bad = json!({
        "schema_version": 1,
        "measurements": [{"name": "a", "outcomes": 2}, {"name": "b", "outcomes": 2}, {"name": "c", "outcomes": 2}],
        "sources": [
            {"name": "S", "connects": ["a", "b", "c"]},
            {"name": "T", "connects": ["a", "b"]}
        ]
    });
    let o = run(&["validate-scenario"], &bad.to_string());
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("AntiChainViolation"));

    let ok = run(&["validate-scenario"], &square_scenario());
    assert_eq!(ok.status.code(), Some(0));
    let c = run(&["classify-scenario"], &square_scenario());
    assert!(stdout(&c).contains("C4"));
}

#[test]
fn generated_documents_round_trip() {
    for args in [
        vec!["gen", "pr-box"],
        vec!["gen", "pr-box", "--as", "path"],
        vec!["gen", "perfect"],
        vec!["gen", "quantum-c3"],
    ] {
        let first = stdout(&run(&args, ""));
        let doc = corrscen::io::parse_document(&first).unwrap();
        let p: corrscen::dist::JointDistribution =
            corrscen::io::distribution_from_json(&doc).unwrap();
        let back = corrscen::io::distribution_to_json(&p);
        if doc["probabilities"]
            .as_array()
            .unwrap()
            .iter()
            .all(Value::is_number)
        {
            assert_eq!(back, doc, "{args:?}");
        } else {
            let exact: corrscen::dist::ExactDistribution =
                corrscen::io::distribution_from_json(&doc).unwrap();
            assert_eq!(corrscen::io::distribution_to_json(&exact), doc, "{args:?}");
        }
        let reparsed: corrscen::dist::JointDistribution =
            corrscen::io::distribution_from_json(&back).unwrap();
        assert_eq!(reparsed, p);
        let again = stdout(&run(&args, ""));
        assert_eq!(first, again);
    }
    let dir = TempDir::new("gen");
    let model = stdout(&run(&["gen", "quantum-c3", "--as", "model"], ""));
    let file = dir.write("model.json", &model);
    let o = run(&["eval", "quantum", "--model", &file], "");
    assert!(o.status.success());
}

#[test]
fn deterministic_runs_are_byte_identical() {
    let dir = TempDir::new("det");
    let scen = dir.write("c4.json", &square_scenario());
    let dist = dir.write("pr.json", &stdout(&run(&["gen", "pr-box"], "")));
    let args = [
        "--deterministic",
        "search-model",
        "--scenario",
        &scen,
        "--dist",
        &dist,
        "--k",
        "2",
        "--restarts",
        "2",
    ];
    let a = run(&args, "");
    let b = run(&args, "");
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), b.status.code());
}

#[test]
fn schema_is_printed() {
    let o = run(&["--schema"], "");
    assert!(o.status.success());
    let v = json_of(&o);
    assert!(v.is_object());
    assert!(stdout(&o).contains("schema_version"));
}

#[test]
fn node_budget_from_environment_gives_inconclusive() {
    let dist = stdout(&run(&["gen", "quantum-c3"], ""));
    let mut cmd = bin();
    cmd.env("CORRSCEN_BUDGET_NODES", "1");
    let o = run_with(cmd, &["witness", "ancestor"], &dist);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json_of(&o)["verdict"], "Inconclusive");
}

#[test]
fn bad_input_is_reported_without_panicking() {
    for (args, input) in [
        (vec!["witness", "entropy"], "{"),
        (vec!["witness", "hardy-c4"], "[1, 2, 3]"),
        (vec!["validate-scenario"], "{\"schema_version\": 99}"),
        (vec!["decide", "p4"], "{\"schema_version\": 1, \"variables\": [\"a\"], \"cardinalities\": [2], \"probabilities\": [0.5, 0.6]}"),
        (vec!["check-correlation", "--scenario", "/nonexistent/file.json"], ""),
    ] {
        let o = run(&args, input);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(!err.contains("panicked"), "{args:?}: {err}");
        assert!(json_of(&o)["error"].is_string(), "{args:?}");
    }
}

#[test]
fn time_limit_ends_a_fit_early() {
    let dir = TempDir::new("time");
    let scen = dir.write("c4.json", &square_scenario());
    let dist = dir.write("pr.json", &stdout(&run(&["gen", "pr-box"], "")));
    let start = std::time::Instant::now();
    let args = [
        "--time-limit",
        "0.05",
        "search-model",
        "--scenario",
        &scen,
        "--dist",
        &dist,
        "--k",
        "3",
    ];
    let o = run(&args, "");
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json_of(&o)["outcome"], "Inconclusive");
    assert!(start.elapsed() < std::time::Duration::from_secs(1));
    let bad = run(
        &[
            "--time-limit",
            "0",
            "search-model",
            "--scenario",
            &scen,
            "--dist",
            &dist,
        ],
        "",
    );
    assert_eq!(bad.status.code(), Some(1));
}
