use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

/// Shortest round-trip text for a float; "inf", "-inf" and "nan" for the rest.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else if v == 0.0 || (1e-5..1e16).contains(&v.abs()) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Column-oriented numeric output with provenance.
pub struct Table {
    pub command: &'static str,
    pub params: Value,
    pub notes: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(command: &'static str, params: Value, columns: Vec<String>) -> Self {
        Self { command, params, notes: Vec::new(), columns, rows: Vec::new() }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.csv(),
            Format::Json => {
                let data: serde_json::Map<String, Value> = self
                    .columns
                    .iter()
                    .enumerate()
                    .map(|(i, c)| (c.clone(), self.rows.iter().map(|r| json_number(r[i])).collect()))
                    .collect();
                let doc = json!({
                    "command": self.command,
                    "version": env!("CARGO_PKG_VERSION"),
                    "params": self.params,
                    "notes": self.notes,
                    "columns": self.columns,
                    "data": data,
                });
                pretty(&doc)
            }
        }
    }

    fn csv(&self) -> String {
        let mut out = header(self.command, &self.params);
        for note in &self.notes {
            let _ = writeln!(out, "# {note}");
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

pub fn header(command: &str, params: &Value) -> String {
    format!("# fraccalc {}\n# command: {command}\n# params: {params}\n", env!("CARGO_PKG_VERSION"))
}

/// JSON has no infinities; they become the strings used in CSV.
pub fn json_number(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(fmt_f64(v))
    }
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialise");
    s.push('\n');
    s
}

/// Writes to the path, or to stdout when absent or "-".
pub fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) if p != Path::new("-") => {
            fs::write(p, text).map_err(|e| CliError::Usage(format!("--out: cannot write {}: {e}", p.display())))
        }
        _ => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Usage(format!("stdout: {e}")))
        }
    }
}
