use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn skewhad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skewhad"))
        .args(args)
        .env_remove("SKEWHAD_TOL")
        .env_remove("SKEWHAD_CAP")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn construct_writes_family_and_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let fam = dir.path().join("fam.json");
    let cert = dir.path().join("cert.json");
    let out = skewhad(&["construct", "--q", "5", "--u", "2", "--e", "2", "--out", path_str(&fam), "--cert", path_str(&cert)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let c = json(&out);
    assert_eq!((c["v"].as_u64(), c["k"].as_u64(), c["lambda"].as_u64()), (Some(25), Some(12), Some(11)));
    assert_eq!(c["passed"], Value::Bool(true));
    let on_disk: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(on_disk, c);

    // re-reading the family gives the identical certificate
    let again = skewhad(&["verify", path_str(&fam)]);
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(again.stdout, out.stdout);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&fam).unwrap()).unwrap();
    assert_eq!(doc["blocks"].as_array().unwrap().len(), 2);
}

#[test]
fn round_trip_with_character_criterion() {
    let dir = tempfile::tempdir().unwrap();
    let fam = dir.path().join("fam.json");
    let out = skewhad(&["construct", "--q", "25", "--u", "3", "--e", "1", "--char-check", "--out", path_str(&fam)]);
    assert_eq!(out.status.code(), Some(0));
    let again = skewhad(&["verify", "--char-check", path_str(&fam)]);
    assert_eq!(again.stdout, out.stdout);
}

#[test]
fn corrupted_family_fails_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let fam = dir.path().join("fam.json");
    assert_eq!(skewhad(&["construct", "--q", "13", "--u", "2", "--e", "1", "--out", path_str(&fam)]).status.code(), Some(0));
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(&fam).unwrap()).unwrap();
    doc["blocks"][1] = doc["blocks"][0].clone();
    std::fs::write(&fam, serde_json::to_string(&doc).unwrap()).unwrap();
    let out = skewhad(&["verify", path_str(&fam)]);
    assert_eq!(out.status.code(), Some(2));
    let c = json(&out);
    assert_eq!(c["passed"], Value::Bool(false));
    assert!(c["failure"].as_str().unwrap().contains("element"), "{c}");
}

#[test]
fn parameter_errors_exit_1() {
    let out = skewhad(&["construct", "--q", "7", "--u", "2", "--e", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("q = 7"));
    let out = skewhad(&["construct", "--q", "5", "--u", "2", "--e", "10"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(skewhad(&["construct", "--q", "5", "--u", "2", "--e", "2", "--cap", "24"]).status.code(), Some(1));
    assert_eq!(skewhad(&["construct", "--q", "5", "--u", "2", "--e", "2", "--t", "4"]).status.code(), Some(1));
    assert_eq!(skewhad(&["construct", "--q", "5", "--u", "2", "--e", "2", "--t", "3"]).status.code(), Some(0));
    assert_eq!(skewhad(&["hadamard", "--q", "9", "--u", "2", "--e", "1"]).status.code(), Some(1));
    let out = skewhad(&["hadamard", "--q", "17", "--u", "4", "--e", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("8"));
    assert_eq!(skewhad(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(skewhad(&["search", "--max-order", "3"]).status.code(), Some(1));
    let missing = skewhad(&["verify", "/nonexistent/file.json"]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn environment_overrides_cap() {
    let out = Command::new(env!("CARGO_BIN_EXE_skewhad"))
        .args(["construct", "--q", "5", "--u", "2", "--e", "2"])
        .env("SKEWHAD_CAP", "24")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn hadamard_matrix_file_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let mat = dir.path().join("h.txt");
    let out = skewhad(&["hadamard", "--q", "41", "--u", "3", "--e", "1", "--out", path_str(&mat)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let meta = json(&out);
    assert_eq!(meta["order"].as_u64(), Some(168));
    assert_eq!(meta["assignment"], serde_json::json!([0, 1, 2, 3]));
    assert_eq!(meta["certification"]["is_hadamard"], Value::Bool(true));
    let sidecar: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("h.txt.json")).unwrap()).unwrap();
    assert_eq!(sidecar, meta);
    let text = std::fs::read_to_string(&mat).unwrap();
    let rows: Vec<&str> = text.split_terminator('\n').collect();
    assert_eq!(rows.len(), 168);
    assert!(rows.iter().all(|r| r.len() == 168 && r.bytes().all(|b| b == b'+' || b == b'-')));
    let v = skewhad(&["verify", path_str(&mat)]);
    assert_eq!(v.status.code(), Some(0));
    assert_eq!(json(&v)["is_skew_type"], Value::Bool(true));

    // flip one off-diagonal entry: no longer skew, no longer Hadamard
    let mut bytes = text.into_bytes();
    bytes[3] = if bytes[3] == b'+' { b'-' } else { b'+' };
    std::fs::write(&mat, &bytes).unwrap();
    let v = skewhad(&["verify", "--format", "matrix", path_str(&mat)]);
    assert_eq!(v.status.code(), Some(2));
    assert_eq!(json(&v)["skew_violation"], serde_json::json!([0, 3]));
}

#[test]
fn order_12_from_cli() {
    let out = skewhad(&["hadamard", "--q", "5", "--u", "2", "--e", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["order"].as_u64(), Some(12));
}

#[test]
fn gauss_reports() {
    for (q, t) in [("5", "3"), ("13", "3"), ("5", "4")] {
        let out = skewhad(&["gauss-report", "--q", q, "--u", "2", "--t", t]);
        assert_eq!(out.status.code(), Some(0), "q={q} t={t}");
        let doc = json(&out);
        assert_eq!(doc["passed"], Value::Bool(true));
        assert!(doc["epsilon"]["epsilon_index"].as_u64().unwrap() < 4);
        assert!(doc["checks"].as_array().unwrap().iter().all(|c| c["passed"] == Value::Bool(true)));
        // complex values serialize as [re, im]
        assert_eq!(doc["epsilon"]["epsilon"].as_array().unwrap().len(), 2);
    }
    let out = skewhad(&["gauss-report", "--q", "5", "--u", "2", "--t", "4", "--tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["passed"], Value::Bool(false));
}

#[test]
fn search_lists_reachable_orders() {
    let out = skewhad(&["search", "--max-order", "30"]);
    assert_eq!(out.status.code(), Some(0));
    let orders: Vec<u64> = json(&out).as_array().unwrap().iter().map(|r| r["order"].as_u64().unwrap()).collect();
    assert_eq!(orders, vec![12, 28]);
    let out = skewhad(&["search", "--max-order", "4"]);
    assert_eq!(json(&out), serde_json::json!([]));
}
