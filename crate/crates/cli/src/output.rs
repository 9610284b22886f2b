use std::io::Write;

use anyhow::Result;
use serde_json::Value;

/// What a subcommand produces: a JSON report, an optional table for CSV
/// output, and whether its checks passed.
pub struct Report {
    pub json: Value,
    pub table: Option<Table>,
    pub pass: bool,
}

pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Self { headers: headers.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub fn emit(report: &Report, format: Format, out: &mut impl Write) -> Result<()> {
    match (format, &report.table) {
        (Format::Csv, Some(table)) => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(&table.headers)?;
            for row in &table.rows {
                w.write_record(row)?;
            }
            w.flush()?;
        }
        _ => {
            serde_json::to_writer_pretty(&mut *out, &report.json)?;
            writeln!(out)?;
        }
    }
    Ok(())
}
