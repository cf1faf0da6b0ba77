//! End-to-end tests that drive the built binary.

use serde_json::Value;
use std::process::{Command, Output};

fn fgap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fgap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_stdout(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn count_matches_known_values() {
    let v = json_stdout(&fgap(&["count", "--mu", "1,0,0,0", "--d", "2"]));
    assert_eq!(v["severi_count"], 0);
    assert_eq!(v["recursion_count"], 0);

    let v = json_stdout(&fgap(&["count", "--mu", "1,0,0,2", "--d", "2"]));
    assert_eq!(v["severi_count"], 4);

    let v = json_stdout(&fgap(&["count", "--alpha", "1,2,2,2", "--d", "2"]));
    assert_eq!(v["potential_count"], 27);
    assert_eq!(v["mu"], serde_json::json!([3, 2, 2, 2]));
    assert_eq!(v["strata"].as_array().unwrap().len(), 1);
}

#[test]
fn solve_depth1_branch_coordinates() {
    let out = fgap(&["solve", "--alpha", "0,0,0,0", "--d", "1", "--e", "1,0,-1"]);
    let v = json_stdout(&out);
    assert_eq!(v["count"], 6);
    assert_eq!(v["notice"], "branch values only: solving in branch coordinates, lifting skipped");
    // the six roots of the reduced sextic; no lifting data
    let sols = v["solutions"].as_array().unwrap();
    assert_eq!(sols.len(), 6);
    assert!(sols.iter().all(|s| s.get("rho1").is_none()));
    let has_i = sols.iter().any(|s| {
        let x = &s["x"];
        x[0].as_f64().unwrap().abs() < 1e-9 && (x[1].as_f64().unwrap().abs() - 1.0).abs() < 1e-9
    });
    assert!(has_i, "root at x = i missing");
}

#[test]
fn solve_depth0_empty_report() {
    let v = json_stdout(&fgap(&[
        "solve", "--alpha", "0,0,0,0", "--d", "0", "--periods", "2,0,0.6,1.7",
    ]));
    assert_eq!(v["count"], 1);
    assert_eq!(v["degree_n"], 0);
    assert_eq!(v["solutions"].as_array().unwrap().len(), 1);
}

#[test]
fn solve_depth2_headline() {
    let out = fgap(&[
        "solve", "--alpha", "4,0,0,0", "--d", "2", "--periods", "2,0,0.6,1.7",
    ]);
    let v = json_stdout(&out);
    assert_eq!(v["count"], 27);
    assert_eq!(v["warnings"].as_array().unwrap().len(), 0);
    let sols = v["solutions"].as_array().unwrap();
    for s in sols {
        assert!(s["rho1"].is_array());
        assert!(s["rho2"].is_array());
        for r in s["residuals"].as_array().unwrap() {
            assert!(r.as_f64().unwrap() < 1e-8);
        }
    }
    // lattice echo uses the period schema
    assert!(v["lattice"]["omega_a"].is_array());
}

#[test]
fn spectral_strata_sum() {
    let v = json_stdout(&fgap(&["spectral", "--alpha", "0,0,0,0"]));
    assert_eq!(v["total"], 27);
    assert_eq!(v["mu"], serde_json::json!([1, 0, 0, 0]));
    let strata = v["strata"].as_array().unwrap();
    let sum: i64 = strata.iter().map(|s| s["count"].as_i64().unwrap()).sum();
    assert_eq!(sum, 27);
}

#[test]
fn exceptional_census() {
    let v = json_stdout(&fgap(&["exceptional", "--mu", "3,2,2,2"]));
    assert_eq!(v["neighbor_count"], 24);
    assert_eq!(v["exceptional_count"], 25);
    let neighbors = v["neighbors"].as_array().unwrap();
    assert_eq!(neighbors.len(), 24);
    assert!(neighbors.iter().all(|n| !n["fixed"].as_bool().unwrap()));
}

#[test]
fn recursion_standard_base() {
    let v = json_stdout(&fgap(&["recursion", "--mu", "3,2,2,2", "--d", "2"]));
    assert_eq!(v["count"], 27);
    // depth 3 needs base entries beyond the closed forms
    let out = fgap(&["recursion", "--mu", "1,0,0,0", "--d", "3"]);
    assert!(!out.status.success());
}

#[test]
fn verify_suites_pass() {
    for suite in ["identities", "counts", "appendixb", "lattice"] {
        let out = fgap(&["verify", suite]);
        let v = json_stdout(&out);
        assert_eq!(v["failed"], 0, "suite {suite}: {v}");
    }
}

#[test]
fn invalid_input_exits_one() {
    let out = fgap(&["solve", "--alpha", "1,2,3", "--d", "1", "--e", "1,0,-1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = fgap(&["count", "--mu", "2,0,0,0", "--d", "2"]);
    assert_eq!(out.status.code(), Some(1), "parity-invalid type must be rejected");
    let out = fgap(&["solve", "--alpha", "0,0,0,0", "--d", "1"]);
    assert_eq!(out.status.code(), Some(1), "missing lattice data");
}

#[test]
fn config_file_defaults_and_overrides() {
    let dir = std::env::temp_dir().join("fgap-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("config.json");
    std::fs::write(
        &path,
        r#"{"alpha": [0,0,0,0], "d": 1, "e": [1.0, 0.0, -1.0], "format": "json"}"#,
    )
    .unwrap();
    let v = json_stdout(&fgap(&["solve", "--config", path.to_str().unwrap()]));
    assert_eq!(v["count"], 6);
    // flag overrides the file
    let v = json_stdout(&fgap(&[
        "solve", "--config", path.to_str().unwrap(), "--d", "0",
    ]));
    assert_eq!(v["depth"], 0);
}

#[test]
fn csv_emission() {
    let dir = std::env::temp_dir().join("fgap-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("solutions.csv");
    let out = fgap(&[
        "solve", "--alpha", "0,0,0,0", "--d", "1", "--e", "1,0,-1", "--csv",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("re_x,im_x,re_y,im_y"));
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn wp_eval_satisfies_differential_equation() {
    let v = json_stdout(&fgap(&["wp-eval", "--periods", "2,0,0.6,1.7", "--z", "0.31,0.22"]));
    let p = num_c(&v["wp"]);
    let dp = num_c(&v["wp_prime"]);
    let g2 = num_c(&v["g2"]);
    let g3 = num_c(&v["g3"]);
    let lhs = dp * dp;
    let rhs = 4.0 * p * p * p - g2 * p - g3;
    assert!((lhs - rhs).norm() < 1e-9 * (1.0 + lhs.norm()));
}

fn num_c(v: &Value) -> num_complex::Complex64 {
    num_complex::Complex64::new(v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}
