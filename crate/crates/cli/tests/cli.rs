//! End-to-end runs of the binary: exit codes, JSON shapes, file inputs,
//! and parse diagnostics.

use std::process::{Command, Output};

fn koenigslab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_koenigslab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout should be JSON: {e}\n{}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

const AFFINE_2S_1: &str = r#"{"c0":2,"psi":{"trunc":8,"coeffs":[[1,1.0,0.0]]}}"#;

#[test]
fn koenigs_solves_the_affine_case() {
    let out = koenigslab(&["koenigs", "--symbol", AFFINE_2S_1, "--trunc", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["scheme"], "recurrence");
    assert_eq!(v["u"]["c0"], 1);
    assert_eq!(v["u"]["psi"]["coeffs"], serde_json::json!([[1, 1.0, 0.0]]));
}

#[test]
fn companion_accepts_and_refuses_characteristics() {
    let ok = koenigslab(&[
        "companion",
        "--symbol",
        AFFINE_2S_1,
        "--characteristic",
        "3",
        "--trunc",
        "8",
    ]);
    assert_eq!(ok.status.code(), Some(0));
    let v = stdout_json(&ok);
    assert_eq!(v["c0"], 3);
    assert_eq!(v["psi"]["coeffs"], serde_json::json!([[1, 2.0, 0.0]]));

    // 4 is a power of the characteristic 2: structurally forbidden
    let bad = koenigslab(&[
        "companion",
        "--symbol",
        AFFINE_2S_1,
        "--characteristic",
        "4",
    ]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&bad.stderr).is_empty());
}

#[test]
fn verdict_exit_codes_follow_the_status() {
    let pass = koenigslab(&["criteria", "example48", "--c1", "1", "--c2", "0.2"]);
    assert_eq!(pass.status.code(), Some(0));
    let fail = koenigslab(&["criteria", "example48", "--c1", "1", "--c2", "0.25"]);
    assert_eq!(fail.status.code(), Some(1));
    let v = stdout_json(&fail);
    assert_eq!(v["status"], "FAIL");
}

#[test]
fn malformed_json_exits_2_with_a_diagnostic() {
    let out = koenigslab(&["koenigs", "--symbol", r#"{"c0":2,"psi""#]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("symbol:"), "stderr: {err}");

    // an index beyond the truncation names itself in the diagnostic
    let out = koenigslab(&[
        "resolvent",
        "--symbol",
        AFFINE_2S_1,
        "--series",
        r#"{"trunc":8,"coeffs":[[9,1.0,0.0]]}"#,
        "--lambda",
        "2",
        "--trunc",
        "8",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains('9'), "stderr: {err}");
}

#[test]
fn family_output_feeds_back_through_a_file() {
    let fam = koenigslab(&[
        "shifts", "family", "--c0", "2", "--c1", "1", "--m-max", "3", "-k", "6",
    ]);
    assert_eq!(fam.status.code(), Some(0));
    let path = std::env::temp_dir().join("koenigslab-family-test.json");
    std::fs::write(&path, &fam.stdout).unwrap();
    let arg = format!("@{}", path.display());

    let classes = koenigslab(&["shifts", "classes", "--family", &arg]);
    assert_eq!(classes.status.code(), Some(0));
    let v = stdout_json(&classes);
    assert_eq!(v["classes"], serde_json::json!([[2, 3]]));
    assert_eq!(v["verdict"]["status"], "PASS");

    let double = koenigslab(&[
        "shifts",
        "double",
        "--family",
        &arg,
        "--growth-window",
        "4",
    ]);
    assert_eq!(double.status.code(), Some(0));
    let v = stdout_json(&double);
    assert_eq!(v["dimension"], 7);
    assert_eq!(v["single_shared_pattern"], true);
    std::fs::remove_file(&path).ok();
}

#[test]
fn resolvent_rejects_spectrum_points() {
    let out = koenigslab(&[
        "resolvent",
        "--symbol",
        AFFINE_2S_1,
        "--series",
        r#"{"trunc":8,"coeffs":[[2,1.0,0.0]]}"#,
        "--lambda",
        "1",
        "--trunc",
        "8",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn table_and_csv_formats_render() {
    let table = koenigslab(&[
        "criteria", "example76", "--a", "2.5", "--b", "0.5", "--format", "table",
    ]);
    assert_eq!(table.status.code(), Some(0));
    let text = String::from_utf8_lossy(&table.stdout);
    assert!(text.contains("status") && text.contains("PASS"), "{text}");

    let csv = koenigslab(&[
        "criteria", "example76", "--a", "2.5", "--b", "0.5", "--format", "csv",
    ]);
    let text = String::from_utf8_lossy(&csv.stdout);
    assert!(text.starts_with("field,value"), "{text}");
    assert!(text.contains("status,PASS"), "{text}");
}

#[test]
fn disc_check_passes_the_known_self_map() {
    let out = koenigslab(&[
        "disc",
        "check",
        "--lambda",
        "0.3333333333333333",
        "--psi",
        r#"{"trunc":8,"coeffs":[[1,0.5,0.0]]}"#,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["status"], "PASS");
}

#[test]
fn config_validation_rejects_bad_globals() {
    let out = koenigslab(&["koenigs", "--symbol", AFFINE_2S_1, "--trunc", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = koenigslab(&["koenigs", "--symbol", AFFINE_2S_1, "--tol", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_flag_writes_the_report_to_a_file() {
    let path = std::env::temp_dir().join("koenigslab-out-test.json");
    let out = koenigslab(&[
        "spectrum",
        "--symbol",
        AFFINE_2S_1,
        "--trunc",
        "8",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["class"], "characteristic_at_least_two");
    std::fs::remove_file(&path).ok();
}
