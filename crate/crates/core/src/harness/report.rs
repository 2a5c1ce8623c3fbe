use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::config::ExperimentConfig;
use super::io::write_csv;
use crate::error::Result;

/// Result of one seed, keyed by its index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedResult {
    pub index: u64,
    pub result: Value,
}

/// A side file produced by a run: images, arrays, edge lists.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub seeds: Vec<SeedResult>,
    /// Statistics over seeds; `null` when there are no seeds.
    pub aggregates: Value,
    pub wall_clock_s: f64,
    pub version: String,
    #[serde(skip)]
    pub artifacts: Vec<Artifact>,
}

impl RunReport {
    /// Canonical JSON of everything except the wall clock.
    pub fn body(&self) -> String {
        let mut v = serde_json::to_value(self).expect("reports serialize");
        if let Value::Object(o) = &mut v {
            o.remove("wall_clock_s");
        }
        canonical_json(&v)
    }
}

/// `printf("%.12g")`: 12 significant digits, trailing zeros dropped,
/// exponent form below 1e-4 and from 1e12 on.
pub fn format_g12(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.11e}");
    let (mant, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..12).contains(&exp) {
        let mant = trim_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// JSON with object keys sorted, no whitespace, floats as `%.12g` and
/// non-finite floats as `null`.
pub fn canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, &mut out);
    out
}

fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                match n.as_f64() {
                    Some(x) if x.is_finite() => out.push_str(&format_g12(x)),
                    _ => out.push_str("null"),
                }
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(a) => {
            out.push('[');
            for (i, x) in a.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(x, out);
            }
            out.push(']');
        }
        Value::Object(o) => {
            let mut keys: Vec<&String> = o.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push(':');
                write_value(&o[k], out);
            }
            out.push('}');
        }
    }
}

/// Writes the canonical JSON report to `path`, plus next to it a
/// `<stem>_seeds.csv` with the scalar fields of each seed's result and
/// every artifact. Returns the paths written.
pub fn write_report(report: &RunReport, path: &Path) -> Result<Vec<PathBuf>> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let v = serde_json::to_value(report)?;
    let mut text = canonical_json(&v);
    text.push('\n');
    fs::write(path, text)?;
    let mut written = vec![path.to_path_buf()];
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
    if let Some((header, rows)) = seed_table(&report.seeds) {
        let p = dir.join(format!("{stem}_seeds.csv"));
        fs::write(&p, write_csv(&header, &rows)?)?;
        written.push(p);
    }
    for a in &report.artifacts {
        let p = dir.join(&a.name);
        fs::write(&p, &a.bytes)?;
        written.push(p);
    }
    Ok(written)
}

/// Scalar fields shared by all seed results, one row per seed.
fn seed_table(seeds: &[SeedResult]) -> Option<(Vec<String>, Vec<Vec<String>>)> {
    let first = seeds.first()?.result.as_object()?;
    let keys: Vec<String> = first
        .iter()
        .filter(|(_, v)| matches!(v, Value::Number(_) | Value::Bool(_) | Value::String(_)))
        .map(|(k, _)| k.clone())
        .collect();
    if keys.is_empty() {
        return None;
    }
    let mut header = vec!["seed".to_string()];
    header.extend(keys.iter().cloned());
    let rows = seeds
        .iter()
        .map(|s| {
            let mut row = vec![s.index.to_string()];
            for k in &keys {
                row.push(match s.result.get(k) {
                    Some(Value::String(t)) => t.clone(),
                    Some(v) => canonical_json(v),
                    None => String::new(),
                });
            }
            row
        })
        .collect();
    Some((header, rows))
}

/// Parses a report written by [`write_report`].
pub fn read_report(path: &Path) -> Result<RunReport> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g12_matches_printf() {
        let cases = [
            (0.1 + 0.2, "0.3"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (1e-5, "1e-05"),
            (1.5e-4, "0.00015"),
            (123456789012.0, "123456789012"),
            (1234567890123.0, "1.23456789012e+12"),
            (std::f64::consts::PI, "3.14159265359"),
            (1e100, "1e+100"),
            (0.0001, "0.0001"),
            (999999999999.5, "1e+12"),
        ];
        for (x, s) in cases {
            assert_eq!(format_g12(x), s, "{x}");
        }
    }

    #[test]
    fn canonical_form_sorts_and_nulls() {
        let v = serde_json::json!({"b": 1, "a": [0.5, f64::NAN], "c": {"z": true, "y": "q\""}});
        assert_eq!(canonical_json(&v), r#"{"a":[0.5,null],"b":1,"c":{"y":"q\"","z":true}}"#);
    }
}
