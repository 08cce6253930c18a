use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use cscx_core::cohomology::{rs_cohomology, CohomologyOptions};
use cscx_core::grading::Truncation;
use cscx_core::lefschetz::CsChart;

fn cscx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cscx")).args(args).output().expect("spawn cscx")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn dims(v: &Value, key: &str) -> Vec<u64> {
    v["dims"][key].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect()
}

const BETA_STANDARD: &str = r#"{"degree":1,"nvars":4,"ring":"poly","terms":[
 {"idx":[1],"coef":{"ring":"poly","nvars":4,"terms":[{"exp":[1,0,0,0],"num":"1","den":"1"}]}},
 {"idx":[3],"coef":{"ring":"poly","nvars":4,"terms":[{"exp":[0,0,1,0],"num":"1","den":"1"}]}}]}"#;

const BETA_DEGENERATE: &str = r#"{"degree":1,"nvars":4,"ring":"poly","terms":[
 {"idx":[1],"coef":{"ring":"poly","nvars":4,"terms":[{"exp":[1,0,0,0],"num":"1","den":"1"}]}}]}"#;

#[test]
fn rumin_verify_passes() {
    let o = cscx(&["rumin", "verify", "--n", "2", "--max-weight", "6"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["passed"], Value::Bool(true));
    assert_eq!(v["orders"], v["expected_orders"]);
}

#[test]
fn chart_validate_accepts_standard_potential() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("chart.json");
    std::fs::write(&p, format!(r#"{{"model":"contact","n":2,"ring":"poly","beta":{BETA_STANDARD}}}"#)).unwrap();
    let o = cscx(&["chart", "validate", p.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["valid"], Value::Bool(true));
}

#[test]
fn degenerate_beta_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("chart.json");
    std::fs::write(&p, format!(r#"{{"model":"contact","n":2,"ring":"poly","beta":{BETA_DEGENERATE}}}"#)).unwrap();
    let o = cscx(&["chart", "validate", p.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("not a cs potential"));
}

#[test]
fn affine_cohomology_at_weight_eight() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let csv = dir.path().join("dims.csv");
    let o = cscx(&[
        "cohomology", "--model", "affine", "--n", "2", "--max-weight", "8",
        "--out", out.to_str().unwrap(), "--csv", csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&out);
    assert_eq!(dims(&v, "rs"), vec![1, 1, 0, 0, 0, 0]);
    assert_eq!(dims(&v, "deRham"), vec![1, 0, 0, 0, 0]);
    assert!(v["checks"]["stability"]["stable"].as_array().unwrap().iter().all(|b| b == true));
    let table = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(table.lines().next(), Some("degree,deRham,twisted,rs"));
    assert_eq!(table.lines().nth(2), Some("1,0,0,1"));
}

#[test]
fn torus_cohomology_with_sampled_modes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = cscx(&[
        "cohomology", "--model", "torus", "--n", "2", "--modes", "0", "--sample-modes", "3",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let v = read_json(&out);
    assert_eq!(dims(&v, "deRham"), vec![1, 4, 6, 4, 1]);
    assert_eq!(dims(&v, "rs"), vec![1, 4, 5, 5, 4, 1]);
    assert_eq!(v["truncation"]["modes"].as_array().unwrap().len(), 4);
    assert_eq!(v["checks"]["nonzero_modes_vanish"], Value::Bool(true));
}

#[test]
fn output_is_deterministic_apart_from_timestamp() {
    let run = || {
        let mut v = stdout_json(&cscx(&["cohomology", "--model", "torus", "--n", "2", "--sample-modes", "2"]));
        v.as_object_mut().unwrap().remove("timestamp");
        v
    };
    assert_eq!(run(), run());
}

#[test]
fn cli_matches_library() {
    let v = stdout_json(&cscx(&["cohomology", "--model", "affine", "--n", "2", "--max-weight", "5"]));
    let cs = CsChart::affine(2).unwrap();
    let r = rs_cohomology(&cs, &Truncation::weight(5), CohomologyOptions::default()).unwrap();
    let direct: Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
    assert_eq!(v["dims"], direct["dims"]);
    assert_eq!(v["les"], direct["les"]);
}

#[test]
fn config_file_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"model":"cs-affine","n":2,"ring":"poly","max_weight":4}"#).unwrap();
    let o = cscx(&["cohomology", "--config", cfg.to_str().unwrap(), "--no-stability"]);
    assert_eq!(code(&o), 0);
    assert_eq!(dims(&stdout_json(&o), "rs"), vec![1, 1, 0, 0, 0, 0]);

    std::fs::write(&cfg, r#"{"model":"torus","n":2,"ring":"poly"}"#).unwrap();
    assert_eq!(code(&cscx(&["cohomology", "--config", cfg.to_str().unwrap()])), 2);
    std::fs::write(&cfg, r#"{"model":"torus","colour":"red"}"#).unwrap();
    assert_eq!(code(&cscx(&["cohomology", "--config", cfg.to_str().unwrap()])), 2);
}

#[test]
fn les_reports_connecting_ranks() {
    let o = cscx(&["les", "--model", "torus", "--n", "2", "--modes", "0"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["les"]["exact"], Value::Bool(true));
    assert_eq!(v["les"]["connecting_ranks"], serde_json::json!([1, 4, 1, 0, 0]));
    assert_eq!(v["splice"]["exact"], Value::Bool(true));
}

#[test]
fn rs_build_writes_operators() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ops.json");
    let o = cscx(&["rs", "build", "--model", "torus", "--n", "2", "--modes", "0,1", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v = read_json(&out);
    assert_eq!(v["operators"].as_array().unwrap().len(), 5);
    assert_eq!(v["truncation"]["modes"].as_array().unwrap().len(), 16);
}

#[test]
fn rs_crosscheck_agrees() {
    let o = cscx(&["rs", "crosscheck", "--n", "2", "--max-weight", "4"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["passed"], Value::Bool(true));
    assert_eq!(v["rows"].as_array().unwrap().len(), 5);
}

#[test]
fn lefschetz_csv_table() {
    let o = cscx(&["lefschetz", "table", "--n", "3", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let primitive: Vec<u64> = text.lines().skip(1).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    let binom = |n: u64, k: i64| -> u64 {
        if k < 0 || k as u64 > n {
            return 0;
        }
        (0..k as u64).fold(1, |acc, i| acc * (n - i) / (i + 1))
    };
    for (j, &p) in primitive.iter().enumerate().take(4) {
        assert_eq!(p, binom(6, j as i64) - binom(6, j as i64 - 2), "degree {j}");
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&cscx(&["cohomology", "--n", "2"])), 2);
    assert_eq!(code(&cscx(&["cohomology", "--model", "affine", "--n", "1"])), 2);
    assert_eq!(code(&cscx(&["cohomology", "--model", "affine", "--modes", "0"])), 2);
    assert_eq!(code(&cscx(&["rumin", "verify", "--n", "1"])), 2);
    assert_eq!(code(&cscx(&["nonsense"])), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_cscx"))
        .args(["lefschetz", "table"])
        .env("CSCX_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}
