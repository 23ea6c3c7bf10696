use std::process::{Command, Output};

use serde_json::Value;

fn infpot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_infpot")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn eval_examples() {
    let c = infpot(&["eval", "1", "1"]);
    assert_eq!(c.status.code(), Some(0));
    let v = json(&c);
    assert_eq!(v["u"], 1.0);
    assert_eq!(v["region"], "center");
    assert!(v.get("hessian").is_none() && v["hessian_reason"].is_string());

    let v = json(&infpot(&["eval", "1", "0.3"]));
    assert_eq!(v["u"], 0.3);
    assert_eq!(v["region"], "median");

    let v = json(&infpot(&["eval", "0.5", "0.5"]));
    assert!((v["u"].as_f64().unwrap() - 0.3960).abs() < 1e-4);
    assert_eq!(v["region"], "diagonal");
    assert!(v["hessian_reason"].as_str().unwrap().contains("diagonal"));

    let v = json(&infpot(&["eval", "0.25", "0.75"]));
    assert_eq!(v["region"], "interior-off-diagonal");
    assert!(v["hessian"].is_array());
}

#[test]
fn domain_and_usage_errors() {
    let c = infpot(&["eval", "2.5", "1"]);
    assert_eq!(c.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&c.stderr).contains("[0, 2] x [0, 2]"));
    assert_eq!(infpot(&["eval", "-0.1", "1"]).status.code(), Some(2));
    assert_eq!(infpot(&["grid", "--bogus"]).status.code(), Some(2));
    assert_eq!(infpot(&["grid", "--nx", "1"]).status.code(), Some(2));
    assert_eq!(infpot(&["oracle", "--n", "20"]).status.code(), Some(2));
    assert_eq!(infpot(&["theta", "0.3", "1.5"]).status.code(), Some(2));
    assert_eq!(infpot(&["--abs-tol", "-1", "eval", "0.2", "0.3"]).status.code(), Some(2));
}

#[test]
fn grid_csv_is_deterministic_and_symmetric() {
    let a = infpot(&["grid", "--nx", "11", "--ny", "11"]);
    let b = infpot(&["grid", "--nx", "11", "--ny", "11"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(text.lines().next(), Some("x,y,u,ux,uy,region"));
    assert_eq!(rows.len(), 121);
    for j in 0..11 {
        for i in 0..11 {
            assert_eq!(rows[j * 11 + i][2], rows[i * 11 + j][2]);
        }
    }
    for corner in [0, 10, 110, 120] {
        assert_eq!(rows[corner][2], "0.0");
    }
}

#[test]
fn grid_json_to_file() {
    let dir = std::env::temp_dir().join(format!("infpot-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("g.json");
    let c = infpot(&["grid", "--nx", "5", "--ny", "3", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(c.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 15);
    assert_eq!(v[7]["region"], "center");
    let bad = infpot(&["grid", "--out", dir.join("missing/g.csv").to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("missing"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn verify_suites_report_named_checks() {
    for (suite, name) in [
        ("series", "θ₂ series/product agree"),
        ("field", "∞-harmonic residual < 1e-9"),
        ("analysis", "d_max > 0"),
    ] {
        let c = infpot(&["verify", "--suite", suite]);
        assert_eq!(c.status.code(), Some(0), "{suite}");
        let v = json(&c);
        let check = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).expect(name);
        assert_eq!(check["pass"], true);
    }
}

#[test]
fn oracle_and_diagonal() {
    let c = infpot(&["oracle", "--n", "21", "--stencil-radius", "2"]);
    assert_eq!(c.status.code(), Some(0));
    let v = json(&c);
    assert_eq!(v["n"], 21);
    assert!(v["sup_gap"].as_f64().unwrap() < 0.1);

    let c = infpot(&["diagonal", "--n", "3"]);
    let text = String::from_utf8(c.stdout).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "s,u,g");
    assert_eq!(lines[1], "0.0,0.0,0.0");
    assert_eq!(lines[3], format!("{:?},1.0,1.0", std::f64::consts::SQRT_2));
}

#[test]
fn theta_forms() {
    let v = json(&infpot(&["theta", "0.3", "0.25"]));
    let s = v["series"].as_f64().unwrap();
    assert!((s - v["product"].as_f64().unwrap()).abs() < 1e-14);
    assert_eq!(v["preferred"], "series");
}
