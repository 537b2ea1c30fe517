//! Columnar output in CSV or JSON.
//!
//! CSV: one `#` line with the generation time, a header row, then rows with
//! floats in `{:.16e}` (17 significant digits). JSON: an object with the
//! rows as named fields and a `metadata` object.

use crate::config::Format;
use anyhow::{Context, Result};
use serde_json::{json, Map, Value};
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
    B(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::F(x) => format_float(*x),
            Cell::I(i) => i.to_string(),
            Cell::S(s) => s.clone(),
            Cell::B(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::F(x) if x.is_finite() => json!(x),
            Cell::F(x) => json!(x.to_string()),
            Cell::I(i) => json!(i),
            Cell::S(s) => json!(s),
            Cell::B(b) => json!(b),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}
impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::I(x as i64)
    }
}
impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::B(x)
    }
}
impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::S(x.to_string())
    }
}
impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::S(x)
    }
}

/// 17 significant digits.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// Named columns plus free-form metadata.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub metadata: Map<String, Value>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            ..Self::default()
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn meta(&mut self, key: &str, value: Value) {
        self.metadata.insert(key.to_string(), value);
    }

    pub fn to_csv(&self, timestamp: u64) -> Result<String> {
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::csv))?;
        }
        let body = String::from_utf8(w.into_inner().context("flushing CSV")?)?;
        Ok(format!("# generated_unix_time={timestamp}\n{body}"))
    }

    pub fn to_json(&self, command: &str, wall_time_s: f64) -> Result<String> {
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let m: Map<String, Value> = self
                    .columns
                    .iter()
                    .cloned()
                    .zip(r.iter().map(Cell::json))
                    .collect();
                Value::Object(m)
            })
            .collect();
        let mut meta = self.metadata.clone();
        meta.insert("wall_time_seconds".into(), json!(wall_time_s));
        meta.insert(
            "generator".into(),
            json!(concat!("nls-lab ", env!("CARGO_PKG_VERSION"))),
        );
        let v = json!({ "command": command, "metadata": meta, "records": records });
        Ok(serde_json::to_string_pretty(&v)? + "\n")
    }

    pub fn render(&self, format: Format, command: &str, wall_time_s: f64) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(unix_time()),
            Format::Json => self.to_json(command, wall_time_s),
        }
    }
}

pub fn unix_time() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Write to `path`, or standard output when `None`.
pub fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        let s = format_float(0.1);
        assert_eq!(s, "1.0000000000000001e-1");
        assert_eq!(s.parse::<f64>().unwrap(), 0.1);
        let x = std::f64::consts::PI;
        assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["q", "n", "ok"]);
        t.push(vec![Cell::F(10.0), Cell::from(500usize), Cell::from(true)]);
        let s = t.to_csv(42).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "# generated_unix_time=42");
        assert_eq!(lines[1], "q,n,ok");
        assert_eq!(lines[2], "1.0000000000000000e1,500,true");
    }

    #[test]
    fn json_layout() {
        let mut t = Table::new(&["q"]);
        t.push(vec![Cell::F(2.0)]);
        t.meta("n_points", json!([500]));
        let v: Value = serde_json::from_str(&t.to_json("solve", 0.5).unwrap()).unwrap();
        assert_eq!(v["records"][0]["q"], json!(2.0));
        assert_eq!(v["metadata"]["n_points"][0], json!(500));
        assert_eq!(v["metadata"]["wall_time_seconds"], json!(0.5));
    }
}
