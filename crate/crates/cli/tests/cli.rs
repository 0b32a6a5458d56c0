use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn hkcoeff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hkcoeff")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str, contents: &[u8]) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hkcoeff-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn module_file(name: &str, args: &[&str]) -> PathBuf {
    let mut full = vec!["module"];
    full.extend_from_slice(args);
    let out = hkcoeff(&full);
    json_of(&out);
    scratch(name, &out.stdout)
}

#[test]
fn algebra_table_at_a_vertex() {
    let v = json_of(&hkcoeff(&["algebra", "--group", "sl2", "--q", "3", "--ring", "zmod:9", "--face", "x0"]));
    assert_eq!(v["rank"], 4);
    let table = v["table"].as_array().unwrap();
    assert_eq!(table.len(), 4);
    assert!(table.iter().all(|row| row.as_array().unwrap().len() == 4));
    assert_eq!(v["basis"][0], "1");
}

#[test]
fn verify_is_deterministic() {
    let args = ["verify", "--suite", "braid", "--group", "sl2", "--q", "2", "--ring", "zmod:2", "--seed", "1"];
    let a = hkcoeff(&args);
    let b = hkcoeff(&args);
    assert_eq!(a.stdout, b.stdout);
    let v = json_of(&a);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["pass"], true);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["anchor"].is_string()));
}

#[test]
fn verify_roundtrip_suite_passes() {
    let v = json_of(&hkcoeff(&[
        "verify", "--suite", "roundtrip", "--group", "pgl2", "--q", "3", "--ring", "zmod:9", "--seed", "7", "--cases", "5",
    ]));
    assert_eq!(v["pass"], true);
}

#[test]
fn gl2_rank_one_suite_is_a_configuration_error() {
    let out = hkcoeff(&["verify", "--suite", "rank1", "--group", "gl2", "--q", "2", "--ring", "zmod:2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("GL2"));
}

#[test]
fn homology_recovers_the_module() {
    let path = module_file("m.json", &["--group", "pgl2", "--q", "3", "--ring", "zmod:9", "--seed", "7", "--max-rank", "3"]);
    let m: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    let v = json_of(&hkcoeff(&["homology", "--module", path.to_str().unwrap(), "--radius", "3"]));
    assert_eq!(v["invariants"]["h1"]["zero"], true);
    assert_eq!(v["m_functor"]["rank"], m["rank"]);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn zero_module_gives_zero_diagram() {
    let path = module_file("zero.json", &["--group", "sl2", "--q", "2", "--ring", "zmod:4", "--max-rank", "0"]);
    let v = json_of(&hkcoeff(&["fm", "--module", path.to_str().unwrap()]));
    for face in ["x0", "x1", "C"] {
        assert_eq!(v["diagram"][face]["rank"], 0, "{face}");
    }
    assert_eq!(v["valid"], true);
}

#[test]
fn halftree_report() {
    let path = module_file("h.json", &["--group", "sl2", "--q", "2", "--ring", "zmod:4", "--seed", "3"]);
    let v = json_of(&hkcoeff(&["halftree", "--module", path.to_str().unwrap(), "--radius", "3"]));
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
    assert!(v["phi_t"].is_array());
}

#[test]
fn invalid_module_is_rejected_with_the_relation() {
    let bad = br#"{"ring":"zmod:9","group":{"kind":"sl2","q":3},"rank":1,
        "action":{"s0":[[1]],"s1":[[0]],"t0":[[[1]]]}}"#;
    let path = scratch("bad.json", bad);
    let out = hkcoeff(&["fm", "--module", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("validating") && err.contains("relation"), "{err}");
}
