//! CSV and JSON emitters. Floats are written with 17 significant digits in
//! CSV and as shortest round-trip numbers in JSON, so reruns are
//! byte-identical.

use std::io::Write;

use serde_json::{json, Value};

use crate::config::{Format, RunConfig};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<i32> for Cell {
    fn from(v: i32) -> Self {
        Cell::Int(v.into())
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
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

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n', '\r']) => {
                format!("\"{}\"", s.replace('"', "\"\""))
            }
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(v) => json!(v),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
        }
    }
}

/// A command result: a table plus a summary object.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Value,
    pub tolerances: Value,
}

impl Report {
    pub fn new(command: &'static str, columns: Vec<&'static str>) -> Self {
        Self {
            command,
            columns,
            rows: Vec::new(),
            summary: json!({}),
            tolerances: json!({}),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push_str("\r\n");
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            s.push_str(&line.join(","));
            s.push_str("\r\n");
        }
        s
    }

    pub fn to_json(&self, cfg: &RunConfig) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
            .collect();
        let doc = json!({
            "command": self.command,
            "version": env!("CARGO_PKG_VERSION"),
            "parameters": cfg,
            "tolerances": self.tolerances,
            "summary": self.summary,
            "columns": self.columns,
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
        s.push('\n');
        s
    }

    /// Writes the report to `cfg.out` (or stdout). With a file target the
    /// summary also goes to stdout as one JSON line.
    pub fn emit(&self, cfg: &RunConfig) -> CliResult<()> {
        let text = match cfg.format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(cfg),
        };
        match &cfg.out {
            Some(path) => {
                std::fs::write(path, text).map_err(|source| CliError::Output {
                    path: path.clone(),
                    source,
                })?;
                println!("{}", json!({ "command": self.command, "out": path, "summary": self.summary }));
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(text.as_bytes())
                    .and_then(|_| stdout.flush())
                    .map_err(|source| CliError::Output {
                        path: "<stdout>".into(),
                        source,
                    })?;
            }
        }
        Ok(())
    }
}
