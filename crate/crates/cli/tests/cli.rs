use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn texc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_texc"))
        .args(args)
        .env_remove("TEXC_FLIP_GUARD")
        .output()
        .expect("texc runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn pipeline_p2_is_strong() {
    let out = texc(&["pipeline", "--fan", "P2"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["cardinality"]["found"], 3);
    assert_eq!(v["summary"]["strong"], true);
    assert_eq!(v["summary"]["violations"], 0);
    assert_eq!(v["summary"]["unchecked"], 0);
}

#[test]
fn pipeline_f1_is_clean() {
    let out = texc(&["pipeline", "--fan", "F1"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["collection"]["objects"].as_array().unwrap().len(), 4);
    assert_eq!(v["steps"], serde_json::json!(["divisorial", "fano"]));
    assert_eq!(v["summary"]["violations"], 0);
    assert_eq!(v["summary"]["unchecked"], 0);
}

#[test]
fn pipeline_p112_is_strong() {
    let v = json(&texc(&["pipeline", "--fan", "P112"]));
    assert_eq!(v["cardinality"]["found"], 4);
    assert_eq!(v["summary"]["strong"], true);
}

#[test]
fn pipeline_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = texc(&["pipeline", "--fan", "FLIP3", "--out-dir", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["steps.json", "collection.json", "report.json"] {
        let s = fs::read_to_string(dir.path().join(name)).unwrap();
        serde_json::from_str::<Value>(&s).unwrap();
    }
    let steps: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("steps.json")).unwrap()).unwrap();
    assert_eq!(steps[0]["kind"], "flip");
}

#[test]
fn collection_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("coll.json");
    let p = path.to_str().unwrap();
    assert!(texc(&["collection", "--fan", "P1xP1", "--out", p]).status.success());
    let out = texc(&["verify", "--fan", "P1xP1", "--collection", p]);
    assert!(out.status.success());
    assert_eq!(json(&out)["summary"]["violations"], 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("0 violations"));

    // Reversing the collection must fail verification.
    let mut c: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    c["objects"].as_array_mut().unwrap().reverse();
    fs::write(&path, c.to_string()).unwrap();
    let out = texc(&["verify", "--fan", "P1xP1", "--collection", p]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["summary"]["violations"].as_u64().unwrap() > 0);
}

#[test]
fn cohom_methods_agree() {
    let w = json(&texc(&["cohom", "--fan", "P2", "--class", "0,0,-4"]));
    let c = json(&texc(&[
        "cohom", "--fan", "P2", "--class", "0,0,-4", "--method", "cech",
    ]));
    assert_eq!(w, c);
    assert_eq!(w["dims"], serde_json::json!([0, 0, 3]));
    let neg = json(&texc(&["cohom", "--fan", "P1", "--class", "-3,0"]));
    assert_eq!(neg["dims"], serde_json::json!([0, 2]));
}

#[test]
fn cohom_rejects_wrong_length() {
    let out = texc(&["cohom", "--fan", "P2", "--class", "1,2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_fan_reports_violations() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(
        &path,
        r#"{"dim":1,"rays":[[2],[-1]],"mult":[1,1],"max_cones":[[0],[1]]}"#,
    )
    .unwrap();
    let out = texc(&["check-fan", "--fan", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["ok"], false);
    assert!(v["violations"][0].as_str().unwrap().contains("non-primitive ray 0"));
}

#[test]
fn fan_files_round_trip_through_check_fan() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f1.json");
    let v = json(&texc(&["check-fan", "--fan", "F1"]));
    let canonical = v["fan"].to_string();
    fs::write(&path, &canonical).unwrap();
    let again = json(&texc(&["check-fan", "--fan", path.to_str().unwrap(), "--seed", "17"]));
    assert_eq!(again["fan"].to_string(), canonical);
    assert_eq!(again["k0_rank"], 4);
}

#[test]
fn walls_of_p1xp1() {
    let v = json(&texc(&["walls", "--fan", "P1xP1"]));
    assert_eq!(v.as_array().unwrap().len(), 4);
    assert!(v.as_array().unwrap().iter().all(|w| w["relation"].is_object()));
}

#[test]
fn mmp_trace_and_flip_guard() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.json");
    let out = texc(&["mmp", "--fan", "F1", "--trace", trace.to_str().unwrap()]);
    assert!(out.status.success());
    let log = json(&out);
    assert_eq!(log[0]["kind"], "divisorial");
    let full: Value = serde_json::from_str(&fs::read_to_string(&trace).unwrap()).unwrap();
    assert_eq!(full[0]["contracted_ray"], 2);
    assert!(full[0]["relation"]["a"].is_array());

    let guarded = Command::new(env!("CARGO_BIN_EXE_texc"))
        .args(["mmp", "--fan", "FLIP3"])
        .env("TEXC_FLIP_GUARD", "0")
        .output()
        .unwrap();
    assert_eq!(guarded.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&guarded.stderr).contains("flip guard"));
}

#[test]
fn unknown_fan_is_an_error() {
    let out = texc(&["pipeline", "--fan", "NOPE"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("neither a built-in fan"));
}
