use std::f64::consts::TAU;
use std::process::{Command, Output};

use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_floquet-tls"))
        .args(args)
        .env_remove("FLOQUET_TLS_THREADS")
        .output()
        .expect("binary runs")
}

fn rows(out: &Output) -> Vec<Vec<f64>> {
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    r.records()
        .map(|rec| rec.unwrap().iter().map(|v| v.parse().unwrap_or(f64::NAN)).collect())
        .collect()
}

fn header(out: &Output) -> Vec<String> {
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    r.headers().unwrap().iter().map(String::from).collect()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn usage_errors_exit_with_one() {
    let out = bin(&["solve", "--omega0", "1", "--omega", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(bin(&["quasienergy", "--f", "0.5", "--omega", "0.1:0.2:1"]).status.code(), Some(1));
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(bin(&["solve", "--f", "0.5", "--g", "0.5", "--omega", "1", "--method", "fourier"]).status.code(), Some(1));
    assert_eq!(bin(&["--help"]).status.code(), Some(0));
}

#[test]
fn domain_failures_exit_with_two() {
    // static field with a full turn per period: every orbit is periodic
    let out = bin(&["solve", "--f", "0", "--omega", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = bin(&["resonance", "--n", "3", "--f", "100", "--n-trunc", "6"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("try truncation"));
}

#[test]
fn fourier_trajectory_has_unit_norm() {
    let out = bin(&["solve", "--omega0", "1", "--f", "0.5", "--omega", "2", "--method", "fourier", "--n-trunc", "20"]);
    assert!(out.status.success());
    assert_eq!(header(&out), ["t", "X", "Y", "Z", "norm"]);
    let r = rows(&out);
    assert_eq!(r.len(), 1024);
    assert!(r.iter().all(|row| (row[4] - 1.0).abs() < 1e-6));
}

#[test]
fn compare_reports_agreement() {
    let out = bin(&["solve", "--f", "0.5", "--omega", "2", "--samples", "64", "--compare", "--format", "json"]);
    assert!(out.status.success());
    let doc = json(&out);
    assert!(doc["compare"]["max_deviation"].as_f64().unwrap() < 1e-6);
    assert_eq!(doc["orbit"]["method"], "ode");
    assert_eq!(doc["samples"]["t"].as_array().unwrap().len(), 64);
    assert!(doc["harmonics"]["x"]["cos_coeffs"].is_array());
}

#[test]
fn circular_drive_gives_the_equatorial_circle() {
    let out = bin(&["solve", "--omega0", "1", "--f", "1", "--g", "1", "--omega", "1", "--method", "ode"]);
    assert!(out.status.success());
    for row in rows(&out) {
        let (s, c) = row[0].sin_cos();
        assert!((row[1] - c).abs() < 1e-9 && (row[2] - s).abs() < 1e-9 && row[3].abs() < 1e-9);
    }
}

#[test]
fn quasienergy_rows_are_reduced_and_consistent() {
    let out = bin(&["quasienergy", "--omega0", "1", "--f", "0.5", "--omega", "1.5:2.5:41"]);
    assert!(out.status.success());
    assert_eq!(header(&out), ["omega", "epsilon", "epsilon_mod", "eps_g", "eps_d", "branch"]);
    let r = rows(&out);
    assert_eq!(r.len(), 41);
    for row in &r {
        assert!(row[2] >= 0.0 && row[2] < row[0]);
        assert!((row[1] - row[5] * row[0] - row[2]).abs() < 1e-12);
        assert!((row[1] - row[3] - row[4]).abs() < 1e-8);
    }
    // eps_g / omega against differences of the emitted epsilon column
    for k in 1..r.len() - 1 {
        let fd = (r[k + 1][1] - r[k - 1][1]) / (r[k + 1][0] - r[k - 1][0]);
        assert!((fd - r[k][3] / r[k][0]).abs() < 1e-4, "omega = {}", r[k][0]);
    }
}

#[test]
fn circular_sweep_matches_closed_form() {
    let out = bin(&["quasienergy", "--f", "0.7", "--g", "0.7", "--omega", "0.3:2.9:27"]);
    assert!(out.status.success());
    for row in rows(&out) {
        let w = row[0];
        if row[1].is_nan() {
            continue;
        }
        let big = (0.49 + (1.0 - w) * (1.0 - w)).sqrt();
        let d = |e: f64| {
            let x = (row[2] - e).rem_euclid(w);
            x.min(w - x)
        };
        assert!(d(0.5 * (w + big)).min(d(0.5 * (w - big))) < 1e-8, "omega = {w}");
    }
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let args = ["quasienergy", "--f", "0.5", "--omega", "0.5:2:16", "--format", "json"];
    let a = bin(&args);
    let b = bin(&args);
    let c = Command::new(env!("CARGO_BIN_EXE_floquet-tls")).args(args).env("FLOQUET_TLS_THREADS", "1").output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let doc = json(&a);
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["config"]["omega"]["count"], 16);
    assert_eq!(doc["points"].as_array().unwrap().len(), 16);
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bs.json");
    let out = bin(&["bloch-siegert", "--n", "1", "--max-m", "8", "--output", path.to_str().unwrap()]);
    assert!(out.status.success() && out.stdout.is_empty());
    let written = std::fs::read(&path).unwrap();
    assert_eq!(written, bin(&["bloch-siegert", "--n", "1", "--max-m", "8"]).stdout);
    let doc: Value = serde_json::from_slice(&written).unwrap();
    let last = &doc["coefficients"][7];
    assert_eq!(last["numerator"], "304008125947");
    assert_eq!(last["denominator"], "39397489540237099008");
    let out = bin(&["bloch-siegert", "--n", "4", "--max-m", "1", "--format", "csv"]);
    assert_eq!(rows(&out)[0][..3], [1.0, 7.0, 192.0]);
}

#[test]
fn resonance_rows_lie_in_the_triangle() {
    let out = bin(&["resonance", "--n", "1,2", "--f", "0.000001:3:7"]);
    assert!(out.status.success());
    assert_eq!(header(&out), ["n", "F", "omega_res", "residual", "tri_x", "tri_y", "status"]);
    let r = rows(&out);
    assert_eq!(r.len(), 14);
    assert!((r[0][2] - 1.0).abs() < 1e-5);
    let s3 = 3f64.sqrt();
    for row in &r {
        let (x, y) = (row[4], row[5]);
        assert!(y > 0.0 && y < s3 * (0.5 - x.abs()), "({x}, {y})");
    }
}

#[test]
fn validation_passes_and_filters() {
    let out = bin(&["validate", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out);
    assert_eq!(doc["passed"], true);
    assert_eq!(doc["config"]["seed"], 7);

    let out = bin(&["validate", "--only", "gradients"]);
    let doc = json(&out);
    let checks = doc["checks"].as_array().unwrap();
    assert!(!checks.is_empty() && checks.iter().all(|c| c["group"] == "gradients"));
}

#[test]
fn injected_sign_error_is_caught() {
    let out = bin(&["validate", "--inject-fault", "coupling-sign"]);
    assert_eq!(out.status.code(), Some(3));
    let doc = json(&out);
    let failed: Vec<&Value> = doc["checks"].as_array().unwrap().iter().filter(|c| c["passed"] == false).collect();
    assert!(!failed.is_empty());
    assert!(failed.iter().all(|c| c["group"] == "routes"));
    assert!(failed.iter().any(|c| c["name"].as_str().unwrap().starts_with("Fourier vs integrated orbit")));
}

#[test]
fn period_column_spans_one_period() {
    let out = bin(&["solve", "--f", "0.3", "--omega", "1.7", "--samples", "16"]);
    let r = rows(&out);
    assert_eq!(r[0][0], 0.0);
    assert!((r[15][0] - TAU / 1.7 * 15.0 / 16.0).abs() < 1e-15);
}
