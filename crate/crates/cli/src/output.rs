//! CSV/JSON emission. Reals are printed with six decimals.

use std::fs;
use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use serde_json::{json, Value};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A command's result in both shapes; the caller picks one.
pub struct Report {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub json: Value,
}

impl Report {
    pub fn new(header: &[&str], json: Value) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            json,
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    fn render(&self, format: Format) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.header).map_err(CliError::internal)?;
                for r in &self.rows {
                    w.write_record(r).map_err(CliError::internal)?;
                }
                w.into_inner().map_err(|e| CliError::internal(e.to_string()))
            }
            Format::Json => {
                let mut bytes = serde_json::to_vec_pretty(&self.json).map_err(CliError::internal)?;
                bytes.push(b'\n');
                Ok(bytes)
            }
        }
    }

    pub fn emit(&self, format: Format, out: Option<&Path>) -> Result<(), CliError> {
        let bytes = self.render(format)?;
        match out {
            Some(path) => fs::write(path, bytes).map_err(|e| CliError::internal(format!("{}: {e}", path.display()))),
            None => std::io::stdout().write_all(&bytes).map_err(CliError::internal),
        }
    }
}

pub fn f6(x: f64) -> String {
    format!("{x:.6}")
}

/// JSON number rounded to six decimals.
pub fn j6(x: f64) -> Value {
    let r = (x * 1e6).round() / 1e6;
    json!(if r == 0.0 { 0.0 } else { r })
}

pub fn j6_opt(x: Option<f64>) -> Value {
    x.map(j6).unwrap_or(Value::Null)
}

pub fn complex6(z: ugame::C64) -> Value {
    json!([j6(z.re), j6(z.im)])
}

pub fn matrix6(m: &ugame::ComplexMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|r| Value::Array((0..m.cols()).map(|c| complex6(m[(r, c)])).collect()))
            .collect(),
    )
}
