use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use halfspace_neumann::cli::{run, EXIT_ILL_POSED, EXIT_INPUT, EXIT_OK, EXIT_VERIFY};
use serde_json::Value;
use tempfile::TempDir;

fn hsn(out: &Path, args: &[&str]) -> i32 {
    let mut full = vec!["hsn".to_string()];
    full.extend(args.iter().map(|s| s.to_string()));
    full.push("--out".into());
    full.push(out.display().to_string());
    run(full)
}

fn write(path: &Path, text: &str) {
    fs::write(path, text).unwrap();
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn solve_first_order_matches_closed_form() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("data.csv");
    write(&data, "xi_1,weight,G0_re,G0_im\n0.25,1,1,0\n-1.5,0.5,0,2\n");
    let out = dir.path().join("out");
    let code = hsn(&out, &["--m", "1", "solve", "--data", data.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let mut reader = csv::Reader::from_path(out.join("solution.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 2);
    let expected = [(0.25, 1.0, 0.0), (-1.5, 0.0, 2.0)];
    for (row, (xi, g_re, g_im)) in rows.iter().zip(expected) {
        assert_eq!(&row[2], "ok");
        let s = 2.0 * PI * f64::abs(xi);
        let re: f64 = row[5].parse().unwrap();
        let im: f64 = row[6].parse().unwrap();
        assert!((re - g_re / s).abs() < 1e-12, "{re} vs {}", g_re / s);
        assert!((im - g_im / s).abs() < 1e-12, "{im} vs {}", g_im / s);
    }
    for name in ["synthesis.csv", "norms.json", "manifest.json"] {
        assert!(out.join(name).exists(), "{name} missing");
    }
    let manifest = read_json(&out.join("manifest.json"));
    assert_eq!(manifest["command"], "solve");
    assert_eq!(manifest["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn degenerate_operator_flags_every_frequency() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("data.csv");
    write(&data, "xi_1,weight,G0_re,G0_im,G1_re,G1_im\n0.5,1,1,0,0,0\n2,1,0,0,1,0\n");
    let out = dir.path().join("out");
    let code = hsn(
        &out,
        &["--operator", "biharmonic-rho", "--rho", "1", "solve", "--data", data.to_str().unwrap()],
    );
    assert_eq!(code, EXIT_ILL_POSED);
    let text = fs::read_to_string(out.join("solution.csv")).unwrap();
    assert_eq!(text.matches("ill_posed").count(), 2);
}

#[test]
fn malformed_data_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let empty = dir.path().join("empty.csv");
    write(&empty, "xi_1,weight,G0_re,G0_im,G1_re,G1_im\n");
    assert_eq!(hsn(&out, &["solve", "--data", empty.to_str().unwrap()]), EXIT_INPUT);
    let zero = dir.path().join("zero.csv");
    write(&zero, "xi_1,weight,G0_re,G0_im,G1_re,G1_im\n0.5,1,1,0,0,0\n0,1,1,0,0,0\n");
    assert_eq!(hsn(&out, &["solve", "--data", zero.to_str().unwrap()]), EXIT_INPUT);
    let missing = dir.path().join("missing.csv");
    assert_eq!(hsn(&out, &["solve", "--data", missing.to_str().unwrap()]), EXIT_INPUT);
}

#[test]
fn sweep_range_validation() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    assert_eq!(hsn(&out, &["sweep", "--from", "1", "--to", "-1", "--steps", "5"]), EXIT_INPUT);
    assert_eq!(hsn(&out, &["sweep", "--from", "0", "--to", "1", "--steps", "0"]), EXIT_INPUT);
    assert_eq!(hsn(&out, &["sweep", "--from", "0", "--to", "0", "--steps", "1"]), EXIT_OK);
    let report = read_json(&out.join("sweep.json"));
    assert_eq!(report["zeros"].as_array().unwrap().len(), 0);
    assert_eq!(report["parameters"].as_array().unwrap().len(), 1);
}

#[test]
fn sweep_csv_has_one_row_per_parameter() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let code = hsn(&out, &["sweep", "--from", "-2", "--to", "0.5", "--steps", "26", "--directions", "2"]);
    assert_eq!(code, EXIT_OK);
    let text = fs::read_to_string(out.join("sweep.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("rho,sigma_min_normalized,lambda_slice"));
    assert_eq!(lines.count(), 26);
}

#[test]
fn verify_suites_exit_codes() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    assert_eq!(hsn(&out, &["--seed", "7", "verify", "--suite", "rellich", "--trials", "5"]), EXIT_OK);
    assert!(out.join("verify_rellich.json").exists());
    assert_eq!(
        hsn(&out, &["--seed", "7", "verify", "--suite", "jumps", "--trials", "5", "--random-operators"]),
        EXIT_OK
    );
    assert_eq!(
        hsn(&out, &["--operator", "biharmonic-rho", "--rho", "0", "verify", "--suite", "continuation"]),
        EXIT_OK
    );
    assert_eq!(
        hsn(&out, &["--operator", "biharmonic-rho", "--rho", "1", "verify", "--suite", "continuation"]),
        EXIT_VERIFY
    );
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("data.csv");
    write(&data, "xi_1,weight,G0_re,G0_im,G1_re,G1_im\n0.5,1,1,0,0,0\n-2,0.25,0,1,1,0\n");
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        assert_eq!(hsn(out, &["solve", "--data", data.to_str().unwrap()]), EXIT_OK);
    }
    for name in ["solution.csv", "synthesis.csv", "norms.json"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    let mut ma = read_json(&a.join("manifest.json"));
    let mut mb = read_json(&b.join("manifest.json"));
    ma["config"]["out"] = Value::Null;
    mb["config"]["out"] = Value::Null;
    assert_eq!(ma, mb);
}

#[test]
fn config_file_overrides_flags() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("config.json");
    write(&config, r#"{"m": 1}"#);
    let data = dir.path().join("data.csv");
    write(&data, "xi_1,weight,G0_re,G0_im\n0.5,1,1,0\n");
    let out = dir.path().join("out");
    let code = hsn(
        &out,
        &["--m", "2", "--config", config.to_str().unwrap(), "solve", "--data", data.to_str().unwrap()],
    );
    assert_eq!(code, EXIT_OK);
    let manifest = read_json(&out.join("manifest.json"));
    assert_eq!(manifest["config"]["m"], 1);

    let bad = dir.path().join("bad.json");
    write(&bad, r#"{"colour": 1}"#);
    let code = hsn(&out, &["--config", bad.to_str().unwrap(), "solve", "--data", data.to_str().unwrap()]);
    assert_eq!(code, EXIT_INPUT);
}
