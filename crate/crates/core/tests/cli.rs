use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const QUBIT: &str = r#"{"d":2,"phi":0.6,"n":2,
    "inner_measurement":{"family":"projective"},
    "rho0":{"family":"random_pure","seed":11},
    "seed":2024}"#;

const QUTRIT: &str = r#"{"d":3,"phi":0.9,"n":4,
    "inner_measurement":{"family":"random_povm","seed":5},
    "rho0":{"family":"random_mixed","seed":6},
    "seed":7}"#;

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(config: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quasicopy")).arg("--config").arg(config).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "bad JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

#[test]
fn validate_passes() {
    let dir = TempDir::new().unwrap();
    let out = run(&write(&dir, "q.json", QUTRIT), &["validate"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 7);
    assert!(v["elapsed_ms"].as_f64().unwrap() >= 0.0);
}

#[test]
fn invalid_input_exits_with_two() {
    let dir = TempDir::new().unwrap();
    let bad_json = write(&dir, "a.json", "{\"d\": 2,");
    assert_eq!(run(&bad_json, &["validate"]).status.code(), Some(2));
    assert_eq!(run(&dir.path().join("missing.json"), &["validate"]).status.code(), Some(2));
    let incomplete = write(
        &dir,
        "b.json",
        r#"{"d":1,"phi":0.1,"n":1,"inner_measurement":[{"rows":1,"cols":1,"data":[[0.5,0]]}],
            "rho0":{"family":"maximally_mixed"}}"#,
    );
    let out = run(&incomplete, &["run"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("incomplete"));
    let good = write(&dir, "c.json", QUBIT);
    assert_eq!(run(&good, &["run", "--engine", "quantum"]).status.code(), Some(2));
}

#[test]
fn run_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "q.json", QUTRIT);
    let a = json(&run(&cfg, &["run", "--trial", "17"]));
    let b = json(&run(&cfg, &["run", "--trial", "17"]));
    assert_eq!(a["record"], b["record"]);
    assert_eq!(a["record"]["trial"], 17);
    assert_eq!(a["seed"], 7);
    let c = json(&run(&cfg, &["run", "--trial", "17", "--seed", "8"]));
    assert_eq!(c["seed"], 8);
}

#[test]
fn seed_override_reaches_families() {
    // Families without their own seed follow the top-level one, so --seed changes them.
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "q.json",
        r#"{"d":2,"phi":0.5,"n":2,"inner_measurement":{"family":"random_povm"},
            "rho0":{"family":"random_pure"},"seed":1}"#,
    );
    let a = json(&run(&cfg, &["run"]));
    let b = json(&run(&cfg, &["run", "--seed", "2"]));
    assert_ne!(a["config"]["rho0"], b["config"]["rho0"]);
}

#[test]
fn montecarlo_with_both_engines() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "q.json", QUTRIT);
    let records = dir.path().join("records.jsonl");
    let out = run(
        &cfg,
        &[
            "montecarlo",
            "--trials",
            "3000",
            "--engine",
            "both",
            "--threads",
            "2",
            "--records",
            records.to_str().unwrap(),
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v = json(&out);
    assert_eq!(v["agreement"]["outcome_mismatches"], 0);
    assert_eq!(v["empirical"]["trials"], 3000);
    assert_eq!(v["empirical"]["posterior"]["status"], "defined");
    let lines: Vec<Value> =
        std::fs::read_to_string(&records).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 3000);
    assert_eq!(lines[42]["trial"], 42);
    let successes = lines.iter().filter(|r| r["mu"] == "mu0").count() as u64;
    assert_eq!(Some(successes), v["empirical"]["successes"].as_u64());

    let single = json(&run(&cfg, &["montecarlo", "--trials", "3000", "--engine", "both", "--threads", "1"]));
    assert_eq!(single["empirical"], v["empirical"]);
}

#[test]
fn failing_verdict_exits_with_one() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "q.json", QUBIT);
    // A zero-width band cannot contain a frequency k/1000 when cos^2(0.6)·1000 is not an integer.
    let out = run(&cfg, &["montecarlo", "--trials", "1000", "--sigmas", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["pass"], false);
}

#[test]
fn no_successes_leaves_the_posterior_undefined() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "q.json", &QUBIT.replace("0.6", "1.5707963267948966"));
    let out = run(&cfg, &["montecarlo", "--trials", "500"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["empirical"]["successes"], 0);
    assert_eq!(v["empirical"]["posterior"]["status"], "undefined");
    assert!(v["analytic"]["posterior"].is_null());
}

#[test]
fn tradeoff_grid_and_series() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "q.json", QUBIT);
    let v = json(&run(&cfg, &["tradeoff", "--phi-grid", "0,0.5,1.0"]));
    assert_eq!(v["pass"], true);
    assert_eq!(v["series"]["phi"], serde_json::json!([0.0, 0.5, 1.0]));
    for row in v["rows"].as_array().unwrap() {
        assert_eq!(row["condition_holds"], true);
    }
    let v = json(&run(&cfg, &["tradeoff", "--grid-points", "5"]));
    assert_eq!(v["rows"].as_array().unwrap().len(), 5);

    let unitary = write(
        &dir,
        "u.json",
        r#"{"d":2,"phi":0.6,"n":2,"inner_measurement":{"family":"scaled_unitary","seed":3},
            "rho0":{"family":"maximally_mixed"}}"#,
    );
    let v = json(&run(&unitary, &["tradeoff", "--grid-points", "3"]));
    assert_eq!(v["pass"], true);
    assert!(v["rows"][1]["delta"].as_f64().unwrap() > 0.0);
}

#[test]
fn text_output_and_out_file() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "q.json", QUBIT);
    let out = run(&cfg, &["validate", "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("result: PASS"));

    let target = dir.path().join("report.json");
    let out = run(&cfg, &["run", "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(target).unwrap()).unwrap();
    assert_eq!(v["command"], "run");
}

#[test]
fn out_of_range_phi_warns() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "q.json", &QUBIT.replace("0.6", "2.5"));
    let out = run(&cfg, &["run"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}
