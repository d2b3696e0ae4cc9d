//! CSV and canonical JSON serialization of frequency fields, solutions,
//! sweep curves, reports and run manifests.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::halfspace::{neumann_data, FrequencyField, GridPoint, Sample, Solved, Status};
use crate::verify::SweepReport;

/// Formats a float like C's `%.17g`.
pub fn format_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-4..17).contains(&exp) {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (16 - exp).max(0) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |k: usize| "  ".repeat(k);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_i64() || n.is_u64() {
                out.push_str(&n.to_string());
            } else {
                match n.as_f64() {
                    Some(x) if x.is_finite() => out.push_str(&format_g17(x)),
                    _ => out.push_str("null"),
                }
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(out, item, indent + 1);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (k, key) in keys.iter().enumerate() {
                let _ = write!(out, "{}{}: ", pad(indent + 1), Value::String((*key).clone()));
                write_value(out, &map[*key], indent + 1);
                out.push_str(if k + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

/// Canonical JSON: sorted keys, two-space indentation, floats as `%.17g`,
/// non-finite floats as `null`, trailing newline.
pub fn canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    Ok(out)
}

pub fn write_report<T: Serialize>(path: &Path, report: &T) -> Result<()> {
    fs::write(path, canonical_json(report)?)?;
    Ok(())
}

fn parse_float(field: &str, row: usize, column: &str) -> Result<f64> {
    let x: f64 = field.trim().parse().map_err(|_| Error::Input {
        row,
        message: format!("column {column}: cannot parse {field:?}"),
    })?;
    if !x.is_finite() {
        return Err(Error::Input {
            row,
            message: format!("column {column}: non-finite value"),
        });
    }
    Ok(x)
}

/// Reads a frequency field with columns `xi_1..xi_n, weight` followed by
/// `arity` complex payload pairs `<prefix>k_re, <prefix>k_im`. The
/// dimension `n` is taken from the header. Row numbers in errors count data
/// rows from 1.
pub fn read_frequency_field(path: &Path, arity: usize) -> Result<FrequencyField<Vec<Complex64>>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let headers = reader.headers()?.clone();
    let n = headers.iter().take_while(|h| h.starts_with("xi_")).count();
    if n == 0 {
        return Err(Error::Malformed("header must start with xi_1".into()));
    }
    for (j, h) in headers.iter().take(n).enumerate() {
        if h != format!("xi_{}", j + 1) {
            return Err(Error::Malformed(format!("expected column xi_{}, found {h}", j + 1)));
        }
    }
    let expected = n + 1 + 2 * arity;
    if headers.len() != expected || &headers[n] != "weight" {
        return Err(Error::Malformed(format!(
            "expected {expected} columns (xi_1..xi_{n}, weight, {arity} complex pairs), found {}",
            headers.len()
        )));
    }
    let mut samples = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let row = k + 1;
        let record = record?;
        if record.len() != expected {
            return Err(Error::Input {
                row,
                message: format!("expected {expected} fields, found {}", record.len()),
            });
        }
        let values = record
            .iter()
            .zip(headers.iter())
            .map(|(f, h)| parse_float(f, row, h))
            .collect::<Result<Vec<f64>>>()?;
        let xi = values[..n].to_vec();
        if xi.iter().all(|&x| x == 0.0) {
            return Err(Error::Input {
                row,
                message: "zero frequency".into(),
            });
        }
        let weight = values[n];
        let value = values[n + 1..]
            .chunks(2)
            .map(|p| Complex64::new(p[0], p[1]))
            .collect();
        samples.push(Sample { xi, weight, value });
    }
    if samples.is_empty() {
        return Err(Error::Malformed("no data rows".into()));
    }
    FrequencyField::new(n, samples)
}

pub fn write_frequency_field(path: &Path, field: &FrequencyField<Vec<Complex64>>, prefix: &str) -> Result<()> {
    let arity = field.samples.first().map_or(0, |s| s.value.len());
    let mut w = csv::Writer::from_path(path)?;
    let mut header: Vec<String> = (1..=field.n).map(|j| format!("xi_{j}")).collect();
    header.push("weight".into());
    for k in 0..arity {
        header.push(format!("{prefix}{k}_re"));
        header.push(format!("{prefix}{k}_im"));
    }
    w.write_record(&header)?;
    for s in &field.samples {
        let mut row: Vec<String> = s.xi.iter().map(|&x| format_g17(x)).collect();
        row.push(format_g17(s.weight));
        for z in &s.value {
            row.push(format_g17(z.re));
            row.push(format_g17(z.im));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Solution table: frequency, weight, status, condition estimate, residual,
/// Dirichlet traces `phi` and Neumann data `G` of each solved frequency.
/// Flagged frequencies carry empty trace columns.
pub fn write_solution_field(path: &Path, field: &FrequencyField<Solved>, m: usize) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header: Vec<String> = (1..=field.n).map(|j| format!("xi_{j}")).collect();
    for h in ["weight", "status", "cond", "residual"] {
        header.push(h.into());
    }
    for prefix in ["phi", "G"] {
        for k in 0..m {
            header.push(format!("{prefix}{k}_re"));
            header.push(format!("{prefix}{k}_im"));
        }
    }
    w.write_record(&header)?;
    for s in &field.samples {
        let mut row: Vec<String> = s.xi.iter().map(|&x| format_g17(x)).collect();
        row.push(format_g17(s.weight));
        row.push(match &s.value.status {
            Status::Ok => "ok".into(),
            Status::IllPosed(reason) => format!("ill_posed: {reason}"),
        });
        row.push(format_g17(s.value.cond));
        row.push(format_g17(s.value.residual));
        match (&s.value.symbol, &s.value.solution) {
            (Some(sym), Some(sol)) => {
                for z in sol.traces(m as u32).iter().chain(neumann_data(sym, sol).iter()) {
                    row.push(format_g17(z.re));
                    row.push(format_g17(z.im));
                }
            }
            _ => row.extend(std::iter::repeat_n(String::new(), 4 * m)),
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Gridded values `x_1..x_n, t, u_re, u_im`.
pub fn write_synthesis(path: &Path, grid: &[GridPoint], values: &[Complex64]) -> Result<()> {
    let n = grid.first().map_or(0, |p| p.x.len());
    let mut w = csv::Writer::from_path(path)?;
    let mut header: Vec<String> = (1..=n).map(|j| format!("x_{j}")).collect();
    for h in ["t", "u_re", "u_im"] {
        header.push(h.into());
    }
    w.write_record(&header)?;
    for (p, u) in grid.iter().zip(values) {
        let mut row: Vec<String> = p.x.iter().map(|&x| format_g17(x)).collect();
        row.push(format_g17(p.t));
        row.push(format_g17(u.re));
        row.push(format_g17(u.im));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Sweep curve `rho, sigma_min_normalized, lambda_slice`, one row per value.
pub fn write_sweep_csv(path: &Path, report: &SweepReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["rho", "sigma_min_normalized", "lambda_slice"])?;
    for ((p, s), l) in report
        .parameters
        .iter()
        .zip(&report.sigma_min_normalized)
        .zip(&report.lambda_slice)
    {
        w.write_record([format_g17(*p), format_g17(*s), format_g17(*l)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Run manifest: resolved configuration, crate version, input hashes and a
/// timestamp taken from `SOURCE_DATE_EPOCH` (null when unset).
#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub config: Value,
    pub version: String,
    pub command: String,
    pub inputs: Vec<InputHash>,
    pub outputs: Vec<String>,
    pub timestamp: Option<u64>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct InputHash {
    pub path: String,
    pub sha256: String,
}

impl Manifest {
    pub fn new(command: &str, config: Value) -> Self {
        Manifest {
            config,
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            timestamp: std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.parse().ok()),
            notes: Vec::new(),
        }
    }

    pub fn add_input(&mut self, path: &Path) -> Result<()> {
        self.inputs.push(InputHash {
            path: path.display().to_string(),
            sha256: sha256_file(path)?,
        });
        Ok(())
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        write_report(&dir.join("manifest.json"), self)
    }
}
