//! JSON, CSV and pretty rendering.
//!
//! Machine formats keep every float round-trippable: JSON through the
//! shortest representation that parses back to the same value, CSV with 17
//! significant digits. Pretty output rounds to 6.

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

use crate::error::CliResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

pub fn json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// `x` with 17 significant digits.
pub fn machine_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// `x` with 6 significant digits, fixed-point when that stays short.
pub fn pretty_float(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let e = x.abs().log10().floor() as i32;
    if (-4..6).contains(&e) {
        format!("{:.*}", (5 - e) as usize, x)
    } else {
        format!("{x:.5e}")
    }
}

/// Flattens nested objects and arrays into dotted keys.
pub fn flatten(value: &Value) -> Vec<(String, Value)> {
    let mut out = Vec::new();
    walk(String::new(), value, &mut out);
    out
}

fn walk(prefix: String, value: &Value, out: &mut Vec<(String, Value)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match value {
        Value::Object(map) => map.iter().for_each(|(k, v)| walk(join(k), v, out)),
        Value::Array(items) => items.iter().enumerate().for_each(|(i, v)| walk(join(&i.to_string()), v, out)),
        leaf => out.push((prefix, leaf.clone())),
    }
}

pub fn cell(value: &Value, float: fn(f64) -> String) -> String {
    match value {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) if n.is_f64() => float(n.as_f64().unwrap_or(f64::NAN)),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// One header row and one value row.
pub fn csv_record<T: Serialize>(value: &T) -> CliResult<String> {
    let fields = flatten(&serde_json::to_value(value)?);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(fields.iter().map(|(k, _)| k.as_str()))?;
    w.write_record(fields.iter().map(|(_, v)| cell(v, machine_float)))?;
    finish(w)
}

pub fn csv_table(header: &[String], rows: &[Vec<String>]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    finish(w)
}

fn finish(w: csv::Writer<Vec<u8>>) -> CliResult<String> {
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

/// `key  value` lines.
pub fn pretty<T: Serialize>(value: &T) -> CliResult<String> {
    let fields = flatten(&serde_json::to_value(value)?);
    let width = fields.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut s = String::new();
    for (k, v) in &fields {
        let shown = match v {
            Value::Null => "-".to_string(),
            v => cell(v, pretty_float),
        };
        s.push_str(&format!("{k:<width$}  {shown}\n"));
    }
    Ok(s)
}

pub fn render<T: Serialize>(value: &T, format: Format) -> CliResult<String> {
    match format {
        Format::Json => json(value),
        Format::Csv => csv_record(value),
        Format::Pretty => pretty(value),
    }
}
