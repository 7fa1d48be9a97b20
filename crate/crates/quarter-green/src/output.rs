//! Versioned CSV and JSON rendering of command results.

use std::fmt::Write as _;
use std::str::FromStr;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Map, Number, Value};

pub const FORMAT_TAG: &str = "quarter-green v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}
impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}
impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}
impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// JSON number with seventeen significant digits; non-finite values become
/// strings.
pub fn json_f64(v: f64) -> Value {
    if v.is_finite() {
        Number::from_str(&fmt_f64(v)).map(Value::Number).unwrap_or(Value::Null)
    } else {
        Value::String(fmt_f64(v))
    }
}

/// Rewrites every float in a JSON value with [`json_f64`].
pub fn normalize_numbers(v: Value) -> Value {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => n.as_f64().map_or(Value::Number(n), json_f64),
        Value::Array(a) => Value::Array(a.into_iter().map(normalize_numbers).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, normalize_numbers(v))).collect()),
        other => other,
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => fmt_f64(*v),
            Cell::Bool(v) => v.to_string(),
            Cell::Empty => String::new(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) => json_f64(*v),
            Cell::Bool(v) => Value::Bool(*v),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Output of one command: the echoed configuration and one or more tables.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub config: Value,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    /// Header lines, then per table a `# table:` line, the column names and
    /// the rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {FORMAT_TAG}");
        let _ = writeln!(out, "# config: {}", self.config);
        for t in &self.tables {
            let _ = writeln!(out, "# table: {}", t.name);
            let _ = writeln!(out, "{}", t.columns.join(","));
            for r in &t.rows {
                let line: Vec<String> = r.iter().map(Cell::csv).collect();
                let _ = writeln!(out, "{}", line.join(","));
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut doc = Map::new();
        doc.insert("format".into(), Value::String(FORMAT_TAG.into()));
        doc.insert("config".into(), self.config.clone());
        for t in &self.tables {
            let rows = t
                .rows
                .iter()
                .map(|r| {
                    Value::Object(
                        t.columns
                            .iter()
                            .zip(r)
                            .map(|(c, v)| (c.clone(), v.json()))
                            .collect(),
                    )
                })
                .collect();
            doc.insert(t.name.clone(), Value::Array(rows));
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(doc)).unwrap_or_default();
        s.push('\n');
        s
    }
}

/// Parses one data section of a CSV report back into rows of strings.
pub fn csv_section<'a>(text: &'a str, table: &str) -> Option<(Vec<&'a str>, Vec<Vec<&'a str>>)> {
    let marker = format!("# table: {table}");
    let mut lines = text.lines().skip_while(|l| *l != marker).skip(1);
    let header = lines.next()?.split(',').collect();
    let rows = lines
        .take_while(|l| !l.starts_with('#'))
        .map(|l| l.split(',').collect())
        .collect();
    Some((header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [1.0 / 3.0, std::f64::consts::PI, 1e-300, -2.5e17, 0.1 + 0.2] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
            assert_eq!(s.split('e').next().unwrap().chars().filter(|c| c.is_ascii_digit()).count(), 17);
            let j = json_f64(v).to_string();
            assert_eq!(j.parse::<f64>().unwrap(), v);
        }
        assert_eq!(json_f64(f64::INFINITY), json!("inf"));
    }

    #[test]
    fn csv_and_json_layout() {
        let mut t = Table::new("rows", &["i", "value", "note"]);
        t.push(vec![1u32.into(), 0.5.into(), "a,b".into()]);
        let r = Report {
            config: json!({"command": "x"}),
            tables: vec![t],
        };
        let csv = r.to_csv();
        assert!(csv.starts_with("# quarter-green v1\n# config: {\"command\":\"x\"}\n# table: rows\ni,value,note\n"));
        assert!(csv.contains("1,5.0000000000000000e-1,\"a,b\""));
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["rows"][0]["i"], json!(1));
        assert_eq!(v["format"], json!(FORMAT_TAG));
        let (h, rows) = csv_section(&csv, "rows").unwrap();
        assert_eq!(h, ["i", "value", "note"]);
        assert_eq!(rows.len(), 1);
    }
}
