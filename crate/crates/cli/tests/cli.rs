use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cyclelab"))
        .args(args)
        .env_remove("CYCLELAB_MAX_RANK")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn remark() -> String {
    data("remark.json").display().to_string()
}

#[test]
fn cycles_of_the_dependent_multicurve() {
    let out = run(&["cycles", "enum", "--multicurve", &remark(), "--x", "a1+a2+2a3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let supports: Vec<Vec<String>> = v["cycles"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| serde_json::from_value(c["support"].clone()).unwrap())
        .collect();
    assert!(supports.contains(&vec!["g1".into(), "g2".into(), "g3".into()]));
    assert!(supports.contains(&vec!["g4".into(), "g5".into()]));
}

#[test]
fn membership_failure_is_a_refusal() {
    let out = run(&["membership", "check", "--multicurve", &remark(), "--x", "a1+a2+2a3"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json_of(&out);
    assert_eq!(v["covered"], Value::Bool(true));
    assert_eq!(v["no_null_combination"], Value::Bool(false));

    let cell = run(&["cell", "build", "--multicurve", &remark(), "--x", "a1+a2+2a3", "--require-membership"]);
    assert_eq!(cell.status.code(), Some(2));
    assert!(json_of(&cell)["membership"].is_object());
    let loose = run(&["cell", "build", "--multicurve", &remark(), "--x", "a1+a2+2a3"]);
    assert_eq!(loose.status.code(), Some(2));
}

#[test]
fn cell_of_the_standard_chain() {
    let dir = tempfile::tempdir().unwrap();
    let chain = dir.path().join("chain.json");
    let split = data("splitting_g4.json");
    let out = run(&["family", "build", "--tag", "N", "--splitting", split.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    std::fs::write(&chain, &out.stdout).unwrap();
    let x = "4a1+3a2+2a3+a4";
    let out = run(&["cell", "build", "--multicurve", chain.to_str().unwrap(), "--x", x, "--require-membership"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["dimension"], 2);
    assert_eq!(v["vertices"].as_array().unwrap().len(), 4);
    assert_eq!(v["faces"].as_array().unwrap().len(), 9);
}

#[test]
fn input_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let out = run(&["cycles", "enum", "--multicurve", bad.to_str().unwrap(), "--x", "a1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["cycles", "enum", "--multicurve", &remark(), "--x", "a9"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["cl", "certify", "--region", "p<1|p+q>6", "--entry", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn size_guard_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_cyclelab"))
        .args(["sseq", "run", "--torus", "3"])
        .env("CYCLELAB_MAX_RANK", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("size limit"));
    let ok = run(&["sseq", "run", "--torus", "3"]);
    assert_eq!(ok.status.code(), Some(0));
    let v = json_of(&ok);
    assert_eq!(v["total_homology"], serde_json::json!(["Z", "Z^3", "Z^3", "Z"]));
    assert_eq!(v["matches_direct_homology"], Value::Bool(true));
}

#[test]
fn stability_certificate_for_the_truncated_corner() {
    let out = run(&["cl", "certify", "--region", "p<1|p+q>6", "--entry", "1,5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["certified"], Value::Bool(true));
    assert_eq!(v["entry"], serde_json::json!([1, 5]));
    let out = run(&["cl", "certify", "--region", "p<1", "--entry", "1,5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn quotient_page_of_the_standard_star() {
    let out = run(&["cl", "e1", "--star", "N", "--genus", "3", "--quotient", "--t", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let e = v["entries"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["p"] == 1 && e["q"] == 1)
        .unwrap()
        .clone();
    assert_eq!(e["rank"], 4);
}

#[test]
fn lemma_and_classes() {
    let out = run(&["lemma41", "verify", "--n", "2", "--j", "2", "--q", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["classes", "certify", "--genus", "3", "--count", "3", "--seed", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["rank"], 3);
    assert_eq!(v["seed"], 4);
}

#[test]
fn signs_table_as_csv() {
    let out = run(&["signs", "table", "--gmax", "6", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("g,involution_full"));
    assert!(lines[1].starts_with("3,-1,"));
    assert!(lines[2].starts_with("4,+1,n=1:-1,"));
    assert!(lines.iter().skip(1).all(|l| l.ends_with(",+1")));
}

#[test]
fn artifacts_and_manifest_are_deterministic() {
    let mut bodies = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path().to_str().unwrap();
        let out = run(&["--out", d, "family", "check", "--tag", "N", "--splitting", data("splitting_g4.json").to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        let manifest: Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
        assert_eq!(manifest["exit_code"], 0);
        let file = manifest["artifacts"][0]["path"].as_str().unwrap().to_string();
        bodies.push(std::fs::read(dir.path().join(file)).unwrap());
    }
    assert_eq!(bodies[0], bodies[1]);
}
