//! Tabular reports: `{meta: {seed, version, command}, rows: [...]}` as JSON,
//! or a header plus one line per row as CSV.

use std::io::Write;
use std::path::Path;

use serde_json::{Map, Number};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    /// Empty cell.
    Null,
    Bool(bool),
    Int(i64),
    Num(f64),
    Text(String),
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Num(v)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.into())
    }
}

impl From<Option<f64>> for Value {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Value::Null, Value::Num)
    }
}

pub type Row = Vec<(String, Value)>;

/// Builds a row from `(column, value)` pairs.
pub fn row<const N: usize>(cells: [(&str, Value); N]) -> Row {
    cells.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Meta {
    pub seed: u64,
    pub version: String,
    pub command: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub meta: Meta,
    pub rows: Vec<Row>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

fn non_finite(v: f64) -> &'static str {
    if v.is_nan() {
        "nan"
    } else if v > 0.0 {
        "inf"
    } else {
        "-inf"
    }
}

/// Decimal rendering with at most 12 significant digits; scientific notation
/// outside `1e-5 <= |v| < 1e15`.
pub fn format_number(v: f64) -> String {
    if !v.is_finite() {
        return non_finite(v).into();
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.11e}", v.abs());
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let digits: String = mantissa.chars().filter(|ch| ch.is_ascii_digit()).collect();
    let sign = if v < 0.0 { "-" } else { "" };
    let join = |int: &str, frac: &str| {
        let frac = frac.trim_end_matches('0');
        if frac.is_empty() {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    };
    match exp {
        0..=14 => {
            let split = exp as usize + 1;
            if split >= digits.len() {
                join(&format!("{digits}{}", "0".repeat(split - digits.len())), "")
            } else {
                join(&digits[..split], &digits[split..])
            }
        }
        -5..=-1 => join("0", &format!("{}{digits}", "0".repeat((-exp - 1) as usize))),
        _ => {
            let m = join(&digits[..1], &digits[1..]);
            format!("{m}e{exp}")
        }
    }
}

fn csv_field(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Int(i) => i.to_string(),
        Value::Num(x) => format_number(*x),
        Value::Text(s) => {
            if s.contains([',', '"', '\n', '\r']) {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s.clone()
            }
        }
    }
}

fn json_value(v: &Value) -> serde_json::Value {
    match v {
        Value::Null => serde_json::Value::Null,
        Value::Bool(b) => (*b).into(),
        Value::Int(i) => (*i).into(),
        Value::Num(x) => match Number::from_f64(*x) {
            Some(n) => serde_json::Value::Number(n),
            None => non_finite(*x).into(),
        },
        Value::Text(s) => s.clone().into(),
    }
}

impl Report {
    fn columns(&self) -> Result<Vec<&str>> {
        let first = self.rows.first().ok_or_else(|| CliError::Internal("report has no rows".into()))?;
        let columns: Vec<&str> = first.iter().map(|(k, _)| k.as_str()).collect();
        for r in &self.rows {
            if r.len() != columns.len() || r.iter().zip(&columns).any(|((k, _), c)| k != c) {
                return Err(CliError::Internal("report rows have differing columns".into()));
            }
        }
        Ok(columns)
    }

    pub fn to_csv(&self) -> Result<String> {
        let columns = self.columns()?;
        let mut out = columns.join(",");
        out.push('\n');
        for r in &self.rows {
            let line: Vec<String> = r.iter().map(|(_, v)| csv_field(v)).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String> {
        self.columns()?;
        let mut meta = Map::new();
        meta.insert("seed".into(), self.meta.seed.into());
        meta.insert("version".into(), self.meta.version.clone().into());
        meta.insert("command".into(), self.meta.command.clone().into());
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| serde_json::Value::Object(r.iter().map(|(k, v)| (k.clone(), json_value(v))).collect()))
            .collect();
        let mut doc = Map::new();
        doc.insert("meta".into(), serde_json::Value::Object(meta));
        doc.insert("rows".into(), rows.into());
        let mut text = serde_json::to_string_pretty(&serde_json::Value::Object(doc))
            .map_err(|e| CliError::Internal(e.to_string()))?;
        text.push('\n');
        Ok(text)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

/// Writes the report to `path`, or to standard output when `path` is `None`.
pub fn emit_report(report: &Report, format: Format, path: Option<&Path>) -> Result<()> {
    let text = report.render(format)?;
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn parse_error(msg: impl Into<String>) -> CliError {
    CliError::Parse(msg.into())
}

fn scalar(v: &serde_json::Value) -> Result<Value> {
    Ok(match v {
        serde_json::Value::Null => Value::Null,
        serde_json::Value::Bool(b) => Value::Bool(*b),
        serde_json::Value::Number(n) => match n.as_i64() {
            Some(i) if !n.is_f64() => Value::Int(i),
            _ => Value::Num(n.as_f64().ok_or_else(|| parse_error("number out of range"))?),
        },
        serde_json::Value::String(s) => match s.as_str() {
            "inf" => Value::Num(f64::INFINITY),
            "-inf" => Value::Num(f64::NEG_INFINITY),
            "nan" => Value::Num(f64::NAN),
            _ => Value::Text(s.clone()),
        },
        _ => return Err(parse_error("row values must be scalars")),
    })
}

/// Reads a JSON report back, for replay and comparison.
pub fn parse_report(text: &str) -> Result<Report> {
    let doc: serde_json::Value = serde_json::from_str(text).map_err(|e| parse_error(e.to_string()))?;
    let doc = doc.as_object().ok_or_else(|| parse_error("report must be an object"))?;
    let meta = doc.get("meta").and_then(|m| m.as_object()).ok_or_else(|| parse_error("missing meta object"))?;
    let text_field = |key: &str| -> Result<String> {
        meta.get(key).and_then(|v| v.as_str()).map(str::to_string).ok_or_else(|| parse_error(format!("meta.{key} must be a string")))
    };
    let meta = Meta {
        seed: meta.get("seed").and_then(|v| v.as_u64()).ok_or_else(|| parse_error("meta.seed must be an unsigned integer"))?,
        version: text_field("version")?,
        command: text_field("command")?,
    };
    let rows = doc.get("rows").and_then(|r| r.as_array()).ok_or_else(|| parse_error("missing rows array"))?;
    let rows = rows
        .iter()
        .map(|r| {
            let obj = r.as_object().ok_or_else(|| parse_error("rows must be objects"))?;
            obj.iter().map(|(k, v)| Ok((k.clone(), scalar(v)?))).collect::<Result<Row>>()
        })
        .collect::<Result<Vec<Row>>>()?;
    let report = Report { meta, rows };
    if !report.rows.is_empty() {
        report.columns().map_err(|_| parse_error("rows have differing columns"))?;
    }
    Ok(report)
}

pub fn load_report(path: &Path) -> Result<Report> {
    parse_report(&std::fs::read_to_string(path)?)
}
