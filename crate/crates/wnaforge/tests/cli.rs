use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn wnaforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wnaforge")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json report")
}

/// The report without its timing field.
fn payload(o: &Output) -> Value {
    let mut v = json(o);
    v.as_object_mut().unwrap().remove("wall_time_ms");
    v
}

#[test]
fn exit_codes() {
    assert_eq!(code(&wnaforge(&["verify-commute", "ncKdV"])), 0);
    assert_eq!(code(&wnaforge(&["check", "theta12-elimination"])), 0);
    assert_eq!(code(&wnaforge(&["check", "theta12-elimination-perturbed"])), 2);
    assert_eq!(code(&wnaforge(&["derive", "theta", "1", "1"])), 1);
    assert_eq!(code(&wnaforge(&["solve", "--spec", "singular"])), 2);
    assert_eq!(code(&wnaforge(&["solve"])), 1);
    assert_eq!(code(&wnaforge(&["frobnicate"])), 1);
    assert_eq!(code(&wnaforge(&["check", "no/such/file.json"])), 1);
    assert_eq!(code(&wnaforge(&["tau", "--spec", "rect", "--star", "moyal"])), 1);
    assert_eq!(code(&wnaforge(&["tau", "--spec", "square"])), 1);
    assert_eq!(code(&wnaforge(&["derive", "theta", "2", "3", "--depth", "4"])), 3);
    assert_eq!(code(&wnaforge(&["--help"])), 0);
}

#[test]
fn reports_carry_the_contract_fields() {
    let o = wnaforge(&["check", "theta12-elimination-perturbed"]);
    let v = json(&o);
    assert_eq!(v["residual_zero"], Value::Bool(false));
    assert!(v["first_nonzero_monomial"].as_str().unwrap().contains("1/10"));
    assert!(v["order_checked"].is_null());
    assert!(v["wall_time_ms"].is_u64());

    let v = json(&wnaforge(&["solve", "--spec", "scalar", "--order", "4"]));
    assert_eq!(v["residual_zero"], Value::Bool(true));
    assert!(v["first_nonzero_monomial"].is_null());
    // pKP (2,3) has derivative order 6, so its window at D = 4 is empty
    assert_eq!(v["order_checked"], Value::from(-2));
}

#[test]
fn output_is_deterministic() {
    for args in [&["derive", "theta", "1", "3"][..], &["check", "kdv-example"], &["xi-check", "--k", "1/2,-3", "--order", "3"]] {
        assert_eq!(payload(&wnaforge(args)), payload(&wnaforge(args)), "{:?}", args);
    }
}

#[test]
fn derive_writes_both_forms() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(code(&wnaforge(&["derive", "theta", "2", "1", "--out", out])), 0);
    let txt = fs::read_to_string(dir.path().join("theta_2_1.txt")).unwrap();
    let tex = fs::read_to_string(dir.path().join("theta_2_1.tex")).unwrap();
    // θ_{21} = −θ_{12}
    assert!(txt.contains("D[th{2,1}](phi) = -1/6*D[t{3}](phi)"), "{}", txt);
    assert!(tex.contains("\\frac"), "{}", tex);
    assert!(dir.path().join("report.json").exists());

    let o = wnaforge(&["--format", "latex", "derive", "word", "1", "2"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("t_{12}"));
}

#[test]
fn solve_from_a_file_with_matrix_references() {
    let dir = tempfile::tempdir().unwrap();
    let m = |d: &str| format!(r#"{{"rows": 1, "cols": 1, "data": [["{}"]]}}"#, d);
    fs::write(dir.path().join("l.json"), m("2")).unwrap();
    let spec = format!(
        r#"{{"L": "l.json", "R": {}, "K": {}, "phi0": {}, "vars": [1, 2], "star": "moyal", "order": 3}}"#,
        m("3"),
        m("1"),
        m("1/2")
    );
    let path = dir.path().join("spec.json");
    fs::write(&path, spec).unwrap();
    let out = dir.path().join("out");
    let o = wnaforge(&["solve", "--spec", path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert!(v["checks"].as_array().unwrap().iter().any(|c| c["name"] == "deformation th{1,2}"));
    let csv = fs::read_to_string(out.join("phi.csv")).unwrap();
    assert!(csv.starts_with("row,col,monomial,coefficient"));
}

#[test]
fn plain_format_and_env_override() {
    let o = wnaforge(&["--format", "plain", "verify-commute", "riccati", "t1", "th12"]);
    let s = String::from_utf8_lossy(&o.stdout);
    assert_eq!(code(&o), 0);
    assert!(s.contains("conditional on {t{2}}"), "{}", s);

    let o = Command::new(env!("CARGO_BIN_EXE_wnaforge"))
        .args(["check", "theta12-elimination"])
        .env("WNAFORGE_MAX_ITER", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
}
