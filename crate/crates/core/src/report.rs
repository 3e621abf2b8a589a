//! Tabular command output as CSV (with a `#` metadata block) or JSON.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.to_string(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[idx]).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Meta {
    pub version: String,
    pub command: String,
    pub config_sha256: String,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub meta: Meta,
    pub tables: Vec<Table>,
    /// `Some(false)` marks a failed verification.
    pub passed: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::InvalidArgument(format!("output: {e}"))
}

impl Report {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn write<W: Write>(&self, format: Format, mut out: W) -> Result<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut out, self).map_err(io_err)?;
                writeln!(out).map_err(io_err)
            }
            Format::Csv => {
                writeln!(out, "# entroflow {}", self.meta.version).map_err(io_err)?;
                writeln!(out, "# command: {}", self.meta.command).map_err(io_err)?;
                writeln!(out, "# config_sha256: {}", self.meta.config_sha256).map_err(io_err)?;
                match self.meta.seed {
                    Some(s) => writeln!(out, "# seed: {s}"),
                    None => writeln!(out, "# seed: none"),
                }
                .map_err(io_err)?;
                if let Some(p) = self.passed {
                    writeln!(out, "# passed: {p}").map_err(io_err)?;
                }
                for table in &self.tables {
                    writeln!(out, "# table: {}", table.name).map_err(io_err)?;
                    let mut w = csv::Writer::from_writer(&mut out);
                    w.write_record(&table.columns).map_err(io_err)?;
                    for row in &table.rows {
                        w.write_record(row.iter().map(Cell::render)).map_err(io_err)?;
                    }
                    w.flush().map_err(io_err)?;
                }
                Ok(())
            }
        }
    }

    pub fn render(&self, format: Format) -> Result<String> {
        let mut buf = Vec::new();
        self.write(format, &mut buf)?;
        String::from_utf8(buf).map_err(io_err)
    }
}
