use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const BELL: &str = r#"{"dim_a":2,"dim_b":2,"coeff":{"rows":2,"cols":2,"data":[[0.7071067811865476,0],[0,0],[0,0],[0.7071067811865476,0]]}}"#;
const SKEW: &str = r#"{"dim_a":2,"dim_b":2,"coeff":{"rows":2,"cols":2,"data":[[0.8944271909999159,0],[0,0],[0,0],[0.4472135954999579,0]]}}"#;

fn eprmap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eprmap")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn epr_on_bell() {
    let dir = tempfile::tempdir().unwrap();
    let bell = write(dir.path(), "bell.json", BELL);
    let out = eprmap(&["epr", s(&bell)]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    for (_, r) in report["residuals"].as_object().unwrap() {
        assert!(r.as_f64().unwrap() < 1e-12);
    }
    assert_eq!(report["s_ba"]["parity"], "antilinear");
}

#[test]
fn malformed_and_non_finite_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"dim_a\": 2,");
    assert_eq!(eprmap(&["epr", s(&bad)]).status.code(), Some(2));
    let big = write(
        dir.path(),
        "inf.json",
        r#"{"dim_a":1,"dim_b":1,"coeff":{"rows":1,"cols":1,"data":[[1e400,0]]}}"#,
    );
    assert_eq!(eprmap(&["epr", s(&big)]).status.code(), Some(2));
    let missing = dir.path().join("nope.json");
    assert_eq!(eprmap(&["epr", s(&missing)]).status.code(), Some(2));
    assert_eq!(eprmap(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn teleport_bell_and_skewed() {
    let dir = tempfile::tempdir().unwrap();
    let bell = write(dir.path(), "bell.json", BELL);
    let skew = write(dir.path(), "skew.json", SKEW);
    let out = eprmap(&["teleport", s(&bell), s(&bell)]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert!((r["trace_norm"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((r["op_bound"].as_f64().unwrap() - 0.25).abs() < 1e-12);

    let channel = write(dir.path(), "channel.json", &format!(r#"{{"psi_ab":{BELL},"phi_bc":{SKEW}}}"#));
    let out = eprmap(&["teleport", "--channel", s(&channel)]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert!((r["fidelity"].as_f64().unwrap() - 0.948683).abs() < 1e-6);
    assert_eq!(r, json(&eprmap(&["teleport", s(&bell), s(&skew)])));
}

#[test]
fn teleport_dimension_mismatch_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bell = write(dir.path(), "bell.json", BELL);
    let wide = write(
        dir.path(),
        "wide.json",
        r#"{"dim_a":3,"dim_b":1,"coeff":{"rows":3,"cols":1,"data":[[1,0],[0,0],[0,0]]}}"#,
    );
    assert_eq!(eprmap(&["teleport", s(&bell), s(&wide)]).status.code(), Some(2));
}

#[test]
fn luders_from_projection() {
    let dir = tempfile::tempdir().unwrap();
    let bell = write(dir.path(), "bell.json", BELL);
    let identity = write(
        dir.path(),
        "p.json",
        r#"{"rows":4,"cols":4,"data":[[1,0],[0,0],[0,0],[0,0],[0,0],[1,0],[0,0],[0,0],[0,0],[0,0],[1,0],[0,0],[0,0],[0,0],[0,0],[1,0]]}"#,
    );
    let out = eprmap(&["luders", "--phi", s(&bell), "--projection", s(&identity), "--dims", "2,2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert_eq!(r["rank"], 4);
    assert!((r["op_bound"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let out = eprmap(&["luders", "--phi", s(&bell), "--projection", s(&identity)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn chain_of_bell_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let chain = write(dir.path(), "chain.json", &format!(r#"{{"stages":[{BELL},{BELL},{BELL},{BELL}]}}"#));
    let out = eprmap(&["chain", s(&chain)]);
    assert_eq!(out.status.code(), Some(0));
    let data = &json(&out)["t"]["data"];
    assert!((data[0][0].as_f64().unwrap() - 0.25).abs() < 1e-14);
    assert!((data[3][0].as_f64().unwrap() - 0.25).abs() < 1e-14);
    let odd = write(dir.path(), "odd.json", &format!(r#"{{"stages":[{BELL},{BELL},{BELL}]}}"#));
    assert_eq!(eprmap(&["chain", s(&odd)]).status.code(), Some(2));
}

#[test]
fn modular_report_shape_and_precondition() {
    let dir = tempfile::tempdir().unwrap();
    let bell = write(dir.path(), "bell.json", BELL);
    let out = eprmap(&["modular", s(&bell), s(&bell)]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    for key in ["S", "Delta", "J", "residuals"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
    let product = write(
        dir.path(),
        "prod.json",
        r#"{"dim_a":2,"dim_b":2,"coeff":{"rows":2,"cols":2,"data":[[1,0],[0,0],[0,0],[0,0]]}}"#,
    );
    assert_eq!(eprmap(&["modular", s(&bell), s(&product)]).status.code(), Some(2));
}

#[test]
fn random_is_deterministic_and_feeds_other_commands() {
    let a = eprmap(&["random", "--seed", "9", "--dims", "3,2"]);
    let b = eprmap(&["random", "--seed", "9", "--dims", "3,2"]);
    assert_eq!(a.stdout, b.stdout);
    let dir = tempfile::tempdir().unwrap();
    let state = write(dir.path(), "r.json", std::str::from_utf8(&a.stdout).unwrap());
    assert_eq!(eprmap(&["epr", s(&state)]).status.code(), Some(0));
    let ent = eprmap(&["random", "--entangled", "--dims", "2,2"]);
    assert_eq!(ent.status.code(), Some(0));
    assert_eq!(eprmap(&["random", "--entangled", "--dims", "2,3"]).status.code(), Some(2));
}

#[test]
fn verify_exit_codes() {
    let smoke = eprmap(&["verify", "--trials", "1"]);
    assert_eq!(smoke.status.code(), Some(0));
    let strict = eprmap(&["verify", "--trials", "2", "--tolerance", "1e-30"]);
    assert_eq!(strict.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&strict.stderr).contains("tolerance exceeded"));
    assert_eq!(eprmap(&["verify", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(eprmap(&["verify", "--tolerance", "-1"]).status.code(), Some(2));
}

#[test]
fn verify_report_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let p1 = dir.path().join("a.json");
    let p2 = dir.path().join("b.json");
    assert_eq!(eprmap(&["verify", "--trials", "3", "--seed", "5", "--out", s(&p1)]).status.code(), Some(0));
    assert_eq!(
        eprmap(&["verify", "--trials", "3", "--seed", "5", "--parallel", "--out", s(&p2)]).status.code(),
        Some(0)
    );
    assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
}
