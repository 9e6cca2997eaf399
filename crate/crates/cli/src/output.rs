//! Rendering of command results as JSON trace documents or CSV tables.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use glab_core::trace::{Header, TraceDoc, SCHEMA_VERSION};
use glab_core::LabError;
use serde::Serialize;

use crate::cli::Format;

/// Column names plus rows, all already rendered as strings.
#[derive(Debug, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

pub struct Report {
    pub body: serde_json::Value,
    pub table: Table,
}

impl Report {
    pub fn new(body: &impl Serialize, table: Table) -> Result<Self> {
        Ok(Report {
            body: serde_json::to_value(body)?,
            table,
        })
    }
}

pub fn render(header: Header, format: Format, report: &Report) -> Result<Vec<u8>> {
    match format {
        Format::Json => Ok(TraceDoc::new(header, &report.body).to_json().into_bytes()),
        Format::Csv => csv_bytes(&report.table),
    }
}

pub fn render_truncated(header: Header, format: Format, err: &LabError) -> Result<Vec<u8>> {
    match format {
        Format::Json => Ok(TraceDoc::new(header, serde_json::Value::Null)
            .truncated(err)
            .to_json()
            .into_bytes()),
        Format::Csv => {
            let cap = match err {
                LabError::ResourceCap { cap, .. } => cap.to_string(),
                _ => String::new(),
            };
            csv_bytes(&Table {
                columns: vec!["truncated", "cap"],
                rows: vec![vec![err.to_string(), cap]],
            })
        }
    }
}

fn csv_bytes(t: &Table) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(std::iter::once("schema_version").chain(t.columns.iter().copied()))?;
    let version = SCHEMA_VERSION.to_string();
    for row in &t.rows {
        w.write_record(std::iter::once(&version).chain(row))?;
    }
    w.into_inner().context("flushing csv")
}

pub fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut s = std::io::stdout().lock();
            s.write_all(bytes)?;
            s.flush()?;
            Ok(())
        }
    }
}
