use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phaseclass")).args(args).output().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn squeeze_one_mode() {
    let o = run(&["squeeze", "--r", "1"]);
    assert!(o.status.success());
    let v = json(&o);
    assert!((v["results"]["I_absolute"].as_f64().unwrap() - 1.433781).abs() < 1e-6);
    assert!((v["results"]["I_excess"].as_f64().unwrap() - 0.433781).abs() < 1e-6);
    assert_eq!(v["conventions"]["sigma2"], 0.25);
    let results = v["results"].as_object().unwrap();
    assert!(results.keys().all(|k| v["formulas"].get(k).is_some()));
}

#[test]
fn inverted_oscillator_final_entropy() {
    let o = run(&["evolve", "--potential", "inverted", "--k", "1", "--t-max", "2"]);
    assert!(o.status.success());
    let i = json(&o)["results"]["I_final"].as_f64().unwrap();
    assert!((i - 1.0 - 2f64.cosh().ln()).abs() < 1e-6);
}

#[test]
fn empty_mode_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    std::fs::write(&path, "").unwrap();
    let o = run(&["modes", "--input", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["results"]["total_excess"], 0.0);
    assert_eq!(v["results"]["total_particles"], 0.0);
    let csv = std::fs::read_to_string(dir.path().join("modes.csv")).unwrap();
    assert!(csv.lines().any(|l| l == "k,r,n,I_k"));
    assert!(csv.starts_with("# phaseclass "));
    assert!(csv.contains("hbar=1") && csv.contains("sigma2=0.25") && csv.contains("mass=1"));
}

#[test]
fn validate_reports_violations() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.ini");
    std::fs::write(&cfg, "[conventions]\nhbar = 1\n[husimi]\nstate = mixed\ns = 1.2\n[open-system]\ngamma = -0.5\n").unwrap();
    let o = run(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("0 <= s < 1"), "{text}");
    assert!(text.contains("gamma must be >= 0"), "{text}");

    std::fs::write(&cfg, "[squeeze]\nr = 0.5\n").unwrap();
    let o = run(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["violations"].as_array().unwrap().len(), 0);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["husimi", "--state", "mixed", "--s", "1.2"]).status.code(), Some(2));
    assert_eq!(run(&["open-system", "--gamma", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["squeeze", "--config", "/nonexistent/x.ini"]).status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_phaseclass")).args(["squeeze"]).env("PHASECLASS_THREADS", "zero").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    // 2πħ cell volume rejected up front; a quasiprojector on a too-coarse state grid fails numerically.
    assert_eq!(run(&["classicality", "--volume", "1"]).status.code(), Some(2));
}

#[test]
fn layered_parameters_and_warnings() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.ini");
    std::fs::write(&cfg, "[conventions]\nsigma2 = 0.125\n[evolve]\npotential = harmonic\nomega = 2\nt-max = 1\nbogus = 3\n").unwrap();
    let o = run(&["evolve", "--config", cfg.to_str().unwrap(), "--set", "steps=10"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["parameters"]["steps"], "10");
    assert_eq!(v["parameters"]["omega"], "2");
    assert!((v["results"]["I_final"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    assert!(String::from_utf8_lossy(&o.stderr).contains("unused parameter 'bogus'"));
}
