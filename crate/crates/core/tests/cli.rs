use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_valence-mps"))
        .args(args)
        .env_remove("VALENCE_MPS_DIM_CAP")
        .output()
        .expect("binary runs")
}

fn json_of(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let out = run(&full);
    let v = serde_json::from_slice(&out.stdout).expect("valid json on stdout");
    (out.status.code().unwrap(), v)
}

fn all_checks_pass(v: &Value) -> bool {
    v["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true)
}

#[test]
fn tensor_verify_reports_aux_dim() {
    let (code, v) = json_of(&["tensor", "--rank", "3/2", "--verify"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["tensor"]["aux_dim"], 5);
    assert_eq!(v["results"]["tensor"]["components"].as_array().unwrap().len(), 4);
    assert!(all_checks_pass(&v));
}

#[test]
fn dimer_correlations() {
    let (code, v) = json_of(&["dimer", "--spin", "1/2", "--sites", "6", "--correlations"]);
    assert_eq!(code, 0);
    let bf = &v["results"]["brute_force"];
    assert!((bf["corr_plus"].as_f64().unwrap() + 0.25).abs() < 1e-12);
    assert!((bf["corr_minus"].as_f64().unwrap() + 0.45).abs() < 1e-12);
}

#[test]
fn spin1_couplings_unit_lambda0() {
    let (code, v) = json_of(&["spin1-couplings", "--lambda0", "1"]);
    assert_eq!(code, 0);
    let fitted: Vec<f64> = v["results"]["table"]["fitted"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    let want = [-2.0, 2.0, -3.0, 2.0, 1.0, 1.0, -1.0, 1.0];
    for (a, b) in fitted.iter().zip(want) {
        assert!((a - b).abs() < 1e-9, "{fitted:?}");
    }
}

#[test]
fn para_family_is_nearest_next_nearest() {
    let (code, v) = json_of(&["spin1-couplings", "--para", "6"]);
    assert_eq!(code, 0);
    assert!(v["results"]["reduced"]["delta"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn json_is_byte_identical_across_runs() {
    let args = ["--format", "json", "parent", "--spin", "1", "--window", "3"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(!String::from_utf8_lossy(&a.stdout).contains("timing_ms"));
}

#[test]
fn timing_only_on_request() {
    let (_, v) = json_of(&["--timing", "tensor", "--rank", "1"]);
    assert!(v["timing_ms"].as_f64().is_some());
}

#[test]
fn out_file_matches_stdout_json() {
    let path = std::env::temp_dir().join(format!("valence-mps-cli-{}.json", std::process::id()));
    let p = path.to_str().unwrap();
    let out = run(&["--format", "json", "--out", p, "vbs", "--s", "1", "--sprime", "1/2", "--fusion"]);
    assert_eq!(out.status.code(), Some(0));
    let file = std::fs::read(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(file, out.stdout);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["tensor", "--rank", "1", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["tensor", "--rank", "0.3"]).status.code(), Some(2));
    assert_eq!(run(&["dimer", "--spin", "1/2", "--sites", "5"]).status.code(), Some(2));
    assert_eq!(run(&["symbreak", "--spin", "1/2", "--alpha", "0,0", "--periods", "1"]).status.code(), Some(2));
    assert_eq!(run(&["parent", "--spin", "1", "--window", "3", "--lambda", "-1"]).status.code(), Some(2));
}

#[test]
fn cap_exceeded_exits_3() {
    let out = Command::new(env!("CARGO_BIN_EXE_valence-mps"))
        .args(["dimer", "--spin", "1", "--sites", "6"])
        .env("VALENCE_MPS_DIM_CAP", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
}

#[test]
fn help_exits_0() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("verify-all"));
}

#[test]
fn verify_all_passes() {
    let out = run(&["verify-all"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{text}");
    for id in 1..=10 {
        assert!(text.contains(&format!("[PASS] criterion {id}:")), "criterion {id} missing");
    }
    assert!(!text.contains("[FAIL]"));
}

#[test]
fn single_criterion() {
    let (code, v) = json_of(&["verify-all", "--criterion", "7"]);
    assert_eq!(code, 0);
    assert!(v["results"]["criterion_07"]["passed"] == true);
    assert!(v["results"].get("criterion_01").is_none());
}
