use std::fs;

use halfspace_neumann::halfspace::{FrequencyField, Sample};
use halfspace_neumann::io::{canonical_json, format_g17, read_frequency_field, sha256_file, write_frequency_field, write_sweep_csv};
use halfspace_neumann::verify::{linspace, SweepReport};
use halfspace_neumann::Error;
use num_complex::Complex64;
use serde_json::json;
use tempfile::TempDir;

fn sample_field() -> FrequencyField<Vec<Complex64>> {
    let samples = vec![
        Sample {
            xi: vec![0.1, -2.5],
            weight: 0.125,
            value: vec![Complex64::new(1.0 / 3.0, -1e-300), Complex64::new(6.02e23, 0.0)],
        },
        Sample {
            xi: vec![-1e-7, 3.0],
            weight: 7.0,
            value: vec![Complex64::new(-0.0, std::f64::consts::PI), Complex64::new(2.0, -2.0)],
        },
    ];
    FrequencyField::new(2, samples).unwrap()
}

#[test]
fn frequency_field_round_trips_exactly() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("field.csv");
    let field = sample_field();
    write_frequency_field(&path, &field, "G").unwrap();
    let back = read_frequency_field(&path, 2).unwrap();
    assert_eq!(back, field);
    let again = dir.path().join("again.csv");
    write_frequency_field(&again, &back, "G").unwrap();
    assert_eq!(fs::read(&path).unwrap(), fs::read(&again).unwrap());
    assert_eq!(sha256_file(&path).unwrap(), sha256_file(&again).unwrap());
}

#[test]
fn reader_reports_offending_rows() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.csv");
    fs::write(&path, "xi_1,weight,G0_re,G0_im\n0.5,1,1,0\n0.0,1,1,0\n").unwrap();
    match read_frequency_field(&path, 1) {
        Err(Error::Input { row, .. }) => assert_eq!(row, 2),
        other => panic!("unexpected {other:?}"),
    }
    fs::write(&path, "xi_1,weight,G0_re,G0_im\n0.5,1,nan,0\n").unwrap();
    match read_frequency_field(&path, 1) {
        Err(Error::Input { row, .. }) => assert_eq!(row, 1),
        other => panic!("unexpected {other:?}"),
    }
    fs::write(&path, "xi_1,weight,G0_re,G0_im\n").unwrap();
    assert!(matches!(read_frequency_field(&path, 1), Err(Error::Malformed(_))));
    fs::write(&path, "xi_1,weight,G0_re,G0_im\n0.5,1,1,0\n").unwrap();
    assert!(matches!(read_frequency_field(&path, 2), Err(Error::Malformed(_))));
}

#[test]
fn sweep_csv_has_one_line_per_parameter() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("sweep.csv");
    let parameters = linspace(-3.0, 1.0, 121);
    let report = SweepReport {
        sigma_min_normalized: parameters.iter().map(|p| (p - 1.0).abs()).collect(),
        lambda_slice: parameters.iter().map(|p| 1.0 - p.abs()).collect(),
        zeros: vec![1.0],
        parameters,
    };
    write_sweep_csv(&path, &report).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 122);
    assert_eq!(text.lines().nth(1).unwrap(), "-3,4,-2");
}

#[test]
fn canonical_json_is_sorted_and_keeps_full_precision() {
    let value = json!({"zeta": 0.1, "alpha": [1.0, f64::NAN], "mid": {"b": 2, "a": null}});
    let text = canonical_json(&value).unwrap();
    let expected = "{\n  \"alpha\": [\n    1,\n    null\n  ],\n  \"mid\": {\n    \"a\": null,\n    \"b\": 2\n  },\n  \"zeta\": 0.10000000000000001\n}\n";
    assert_eq!(text, expected);
    assert_eq!(format_g17(0.1).parse::<f64>().unwrap(), 0.1);
    assert_eq!(format_g17(f64::INFINITY), "inf");
}
