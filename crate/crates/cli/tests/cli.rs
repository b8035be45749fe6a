use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn qhe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qhe")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stamped(v: &Value) {
    assert!(v["tool"]["version"].is_string());
    for field in ["gamma", "seed", "backend"] {
        assert!(v.get(field).is_some(), "missing {field}");
    }
}

#[test]
fn keygen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let v = json(&qhe(&["keygen", "--params", "1,1,0,5,2", "--seed", "9", "--out", path.to_str().unwrap()]));
        stamped(&v);
        assert_eq!(v["q"], 7);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let key: Value = serde_json::from_slice(&fs::read(&a).unwrap()).unwrap();
    assert_eq!(key["perm"].as_array().unwrap().len(), 7);
}

#[test]
fn invalid_code_length_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = qhe(&["keygen", "--params", "1,1,0,4,2", "--out", dir.path().join("k").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("4n'+1"));
}

#[test]
fn params_file_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("gamma.json");
    fs::write(&p, r#"{"b":1,"r":1,"t":0,"n":5,"m":1}"#).unwrap();
    let v = json(&qhe(&["roundtrip", "--params", p.to_str().unwrap(), "--gates", "H 0"]));
    assert_eq!(v["gamma"]["q"], 6);
}

#[test]
fn roundtrip_backends_agree() {
    let mut distances = Vec::new();
    for backend in ["oracle", "pauli"] {
        let v = json(&qhe(&[
            "roundtrip", "--params", "1,2,0,5,1", "--gates", "H 0;CNOT 0 1;S 1", "--state", "random:3", "--backend",
            backend, "--seed", "5",
        ]));
        stamped(&v);
        assert_eq!(v["f"], 1);
        assert_eq!(v["backend"], backend);
        distances.push(v["distance"].as_f64().unwrap());
    }
    assert!(distances.iter().all(|d| *d <= 1e-9));
    assert!((distances[0] - distances[1]).abs() <= 1e-9);
}

#[test]
fn t_roundtrip_reports_half() {
    let v = json(&qhe(&["roundtrip", "--params", "1,1,1,5,1", "--gates", "T 0", "--state", "plus", "--backend", "oracle"]));
    assert!((v["success_probability"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!(v["distance"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn empty_circuit_returns_input() {
    let v = json(&qhe(&["roundtrip", "--params", "1,1,0,5,1", "--state", "random:8"]));
    assert_eq!(v["f"], 1);
    assert!(v["distance"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn file_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let path = |n: &str| dir.path().join(n).to_str().unwrap().to_string();
    fs::write(path("c.txt"), "# rotate\nH 0\nS 0\n").unwrap();
    json(&qhe(&["keygen", "--params", "1,1,0,5,1", "--seed", "2", "--out", &path("k.json")]));
    for backend in ["pauli", "oracle"] {
        json(&qhe(&[
            "encrypt", "--params", "1,1,0,5,1", "--key", &path("k.json"), "--state", "zero", "--backend", backend, "--out",
            &path("ct"),
        ]));
        json(&qhe(&["evaluate", "--circuit", &path("c.txt"), "--in", &path("ct"), "--out", &path("ct2")]));
        let v = json(&qhe(&["decrypt", "--key", &path("k.json"), "--in", &path("ct2")]));
        stamped(&v);
        // S H |0> = (|0> + i|1>)/√2
        let rho = &v["rho_out"];
        assert!((rho[0][1][1].as_f64().unwrap() + 0.5).abs() < 1e-9);
    }
    let out = qhe(&["encrypt", "--params", "1,1,0,5,2", "--key", &path("k.json"), "--out", &path("x")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn audit_security_reports_and_guards() {
    let v = json(&qhe(&["audit-security", "--shape", "1,2,3", "--inputs", "zero,one"]));
    stamped(&v);
    let audit = &v["audits"][0];
    assert_eq!(audit["pass"], true);
    assert!(audit["exact"].as_f64().unwrap() <= audit["lemma4"].as_f64().unwrap());
    assert!((audit["lemma4"].as_f64().unwrap() - 1.8973665961).abs() < 1e-9);
    let out = qhe(&["audit-security", "--shape", "3,2,3"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn audit_reliability_flags_vacuity() {
    let v = json(&qhe(&["audit-reliability", "--b", "4", "--t", "1", "--trials", "2000", "--seed", "1"]));
    assert_eq!(v["report"]["delta_vacuous"], true);
    assert_eq!(v["report"]["min_copies_for_target"], 26);
    assert_eq!(v["seed"], 1);
}

#[test]
fn bounds_csv() {
    let out = qhe(&["--format", "csv", "bounds", "--t", "1,2", "--b", "1..3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("t,b,exact,hoeffding,theorem_delta"));
    assert_eq!(text.lines().count(), 7);
    let table = qhe(&["--format", "table", "bounds", "--t", "0", "--b", "2"]);
    assert!(String::from_utf8(table.stdout).unwrap().contains('-'));
}

#[test]
fn demo_runs() {
    let v = json(&qhe(&["demo", "--seed", "4"]));
    stamped(&v);
    assert!(v["distance_to_plaintext"].as_f64().unwrap() <= 1e-9);
    assert!((v["remote_success_probability"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}
