//! Tables with provenance, rendered as CSV, JSON or aligned text.

use std::path::Path;

use partdist_core::{ratio_to_f64, Rational};
use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
    Text,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: Option<u64>,
    pub config: Value,
}

impl Provenance {
    pub fn new(command: &str, seed: Option<u64>, config: Value) -> Self {
        Self { tool: TOOL, version: VERSION, command: command.to_string(), seed, config }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.to_string(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    fn to_json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let object = self.columns.iter().cloned().zip(row.iter().map(|v| Value::String(v.clone()))).collect();
                Value::Object(object)
            })
            .collect();
        Value::Array(rows)
    }
}

/// Output of one command: provenance, flat tables and a structured body.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub provenance: Provenance,
    pub tables: Vec<Table>,
    /// Structured payload for JSON; tables are used when absent.
    pub data: Option<Value>,
    pub warnings: Vec<String>,
}

impl Artifact {
    pub fn new(provenance: Provenance) -> Self {
        Self { provenance, tables: Vec::new(), data: None, warnings: Vec::new() }
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    fn header_lines(&self) -> Result<Vec<String>, CliError> {
        let p = &self.provenance;
        let mut lines = vec![
            format!("# {} {}", p.tool, p.version),
            format!("# command: {}", p.command),
            format!("# seed: {}", p.seed.map_or("none".to_string(), |s| s.to_string())),
            format!("# config: {}", serde_json::to_string(&p.config)?),
        ];
        lines.extend(self.warnings.iter().map(|w| format!("# warning: {w}")));
        Ok(lines)
    }

    pub fn table_csv(&self, table: &Table) -> Result<String, CliError> {
        let mut out = self.header_lines()?.join("\n");
        out.push('\n');
        out.push_str(&format!("# table: {}\n", table.name));
        out.push_str(&csv_body(table)?);
        Ok(out)
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut out = self.header_lines()?.join("\n");
        out.push('\n');
        for (i, table) in self.tables.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push_str(&format!("# table: {}\n", table.name));
            out.push_str(&csv_body(table)?);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let data = match &self.data {
            Some(d) => d.clone(),
            None => Value::Object(self.tables.iter().map(|t| (t.name.clone(), t.to_json())).collect()),
        };
        let body = serde_json::json!({
            "provenance": self.provenance,
            "warnings": self.warnings,
            "data": data,
        });
        let mut text = serde_json::to_string_pretty(&body)?;
        text.push('\n');
        Ok(text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        for table in &self.tables {
            out.push_str(&format!("{}\n", table.name));
            out.push_str(&aligned(table));
            out.push('\n');
        }
        out
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
            Format::Text => Ok(self.to_text()),
        }
    }
}

fn csv_body(table: &Table) -> Result<String, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(&table.columns)?;
    for row in &table.rows {
        writer.write_record(row)?;
    }
    let bytes = writer.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
}

fn aligned(table: &Table) -> String {
    let mut widths: Vec<usize> = table.columns.iter().map(|c| c.len()).collect();
    for row in &table.rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: &[String]| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        format!("{}\n", padded.join("  ").trim_end())
    };
    let mut out = line(&table.columns);
    for row in &table.rows {
        out.push_str(&line(row));
    }
    out
}

/// Six significant digits, shortest form.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        return String::new();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let rounded: f64 = format!("{x:.5e}").parse().unwrap_or(x);
    if rounded.abs() >= 1e7 || rounded.abs() < 1e-4 {
        format!("{rounded:e}")
    } else {
        format!("{rounded}")
    }
}

pub fn fmt_ratio(x: &Rational) -> String {
    fmt_float(ratio_to_f64(x))
}

pub fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p.display().to_string(), e)),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| CliError::io("stdout", e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_rendering() {
        assert_eq!(fmt_float(0.058987654), "0.0589877");
        assert_eq!(fmt_float(1.0), "1");
        assert_eq!(fmt_float(2.3086404e23), "2.30864e23");
        assert_eq!(fmt_float(f64::NAN), "");
    }

    #[test]
    fn csv_has_provenance_and_tables() {
        let mut artifact = Artifact::new(Provenance::new("demo", Some(7), serde_json::json!({"n": 3})));
        let mut t = Table::new("values", &["k", "v"]);
        t.push(vec!["a".into(), "1,5".into()]);
        artifact.tables.push(t);
        let csv = artifact.to_csv().unwrap();
        assert!(csv.starts_with(&format!("# {TOOL} {VERSION}\n")));
        assert!(csv.contains("# seed: 7\n# config: {\"n\":3}\n# table: values\nk,v\na,\"1,5\"\n"));
        let json: Value = serde_json::from_str(&artifact.to_json().unwrap()).unwrap();
        assert_eq!(json["data"]["values"][0]["v"], "1,5");
        assert_eq!(json["provenance"]["seed"], 7);
    }
}
