use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn pnf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pnf")).args(args).env_remove("PNF_ORDER").output().expect("pnf runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn analyze_linearizable_family() {
    let out = pnf(&["analyze", path(&fixture("linear_23.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["verdicts"]["h_all"], true);
    for e in r["verdicts"]["diophantine"]["entries"].as_array().unwrap() {
        assert_eq!(e["omega_squared"], "1");
    }
    assert_eq!(r["output"]["invariant_generators"]["generators"], serde_json::json!([]));
    assert_eq!(r["output"]["resonant_monomials"]["vector"]["entries"], serde_json::json!([]));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("analyze: ok"));
}

#[test]
fn analyze_flags_h3() {
    let r = report(&pnf(&["analyze", path(&fixture("resonant_11.json"))]));
    assert_eq!(r["verdicts"]["hypotheses"]["h3"]["pass"], false);
    assert_eq!(r["verdicts"]["h_all"], false);
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"n\": 2,\n  \"p\": \n}").unwrap();
    let out = pnf(&["analyze", path(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));
}

#[test]
fn jacobi_violation_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let mut f: Value = serde_json::from_str(&std::fs::read_to_string(fixture("linear_23.json")).unwrap()).unwrap();
    f["bracket"]["1,2"] = serde_json::json!([{"monomial": [0, 1, 1], "re": "1", "im": "0"}]);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, f.to_string()).unwrap();
    assert_eq!(pnf(&["normalize", path(&bad)]).status.code(), Some(3));
}

#[test]
fn normalize_linearizes() {
    let out = pnf(&["normalize", path(&fixture("linearizable.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let linear: Value = serde_json::from_str(&std::fs::read_to_string(fixture("linear_23.json")).unwrap()).unwrap();
    assert_eq!(r["output"]["poisson"]["bracket"], linear["bracket"]);
    assert!(r["checklist"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn second_stage_needs_force_and_returns_b() {
    let input = fixture("rank2.json");
    assert_eq!(pnf(&["normalize", path(&input), "--theorem", "2"]).status.code(), Some(4));
    let out = pnf(&["normalize", path(&input), "--theorem", "2", "--force"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let b = r["output"]["b"].as_array().unwrap();
    assert_eq!(b.len(), 1);
    assert!(r["stages"].as_array().unwrap().iter().any(|s| s["name"] == "theorem2/saito"));
}

#[test]
fn check_identity_pipeline_and_perturbation() {
    let dir = tempfile::tempdir().unwrap();
    let a = fixture("three_phase.json");
    let out = pnf(&["check", path(&a), path(&a)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["output"]["diffeo_source"], "identity");

    let norm = dir.path().join("norm.json");
    assert_eq!(pnf(&["normalize", path(&a), "--out", path(&norm)]).status.code(), Some(0));
    let out = pnf(&["check", path(&a), path(&norm)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["output"]["diffeo_source"], "b");

    let mut r: Value = serde_json::from_str(&std::fs::read_to_string(&norm).unwrap()).unwrap();
    // another constant in front of x2 x3 keeps the structure Poisson
    r["output"]["poisson"]["bracket"]["2,3"] = serde_json::json!([{"monomial": [0, 1, 1, 0], "re": "7", "im": "0"}]);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r.to_string()).unwrap();
    let out = pnf(&["check", path(&a), path(&bad), "--diffeo", path(&norm)]);
    assert_eq!(out.status.code(), Some(5));
    let diff = &report(&out)["output"]["first_difference"];
    assert_eq!(diff["indices"], serde_json::json!([2, 3]));
    assert_eq!(diff["monomial"], serde_json::json!([0, 1, 1, 0]));
    assert_eq!(diff["target"], "7");
}

#[test]
fn order_from_env_and_flag() {
    let bin = env!("CARGO_BIN_EXE_pnf");
    let f = fixture("linear_23.json");
    let out = Command::new(bin).args(["analyze", path(&f)]).env("PNF_ORDER", "4").output().unwrap();
    assert_eq!(report(&out)["order"], 4);
    let out = Command::new(bin).args(["analyze", path(&f), "--order", "3"]).env("PNF_ORDER", "4").output().unwrap();
    assert_eq!(report(&out)["order"], 3);
    assert_eq!(report(&pnf(&["analyze", path(&f)]))["order"], 6);
}

#[test]
fn out_flag_and_reproducibility() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture("three_phase.json");
    let target = dir.path().join("r.json");
    let out = pnf(&["normalize", path(&f), "--out", path(&target)]);
    assert!(out.stdout.is_empty());
    let first = std::fs::read(&target).unwrap();
    assert_eq!(pnf(&["normalize", path(&f)]).stdout, first);
}

#[test]
fn batch_processes_every_file() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["linear_23.json", "resonant_11.json"] {
        std::fs::copy(fixture(name), dir.path().join(name)).unwrap();
    }
    std::fs::write(dir.path().join("broken.json"), "[").unwrap();
    let out = pnf(&["analyze", "--batch", path(dir.path())]);
    let r = report(&out);
    assert_eq!(r.as_object().unwrap().len(), 3);
    assert_eq!(r["resonant_11.json"]["verdicts"]["h_all"], false);
    assert_eq!(r["broken.json"]["error"]["exit_code"], 2);
    assert_eq!(out.status.code(), Some(2));
}
