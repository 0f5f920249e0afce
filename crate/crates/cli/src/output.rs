//! Result documents. JSON files look like
//! `{"version": 1, "config": {...}, ...results}`; CSV files start with a
//! `# cubature v1 config=<json>` line followed by a fixed header.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde_json::{Map, Value};

use crate::args::Format;
use crate::error::CliError;

pub const VERSION: u64 = 1;

/// Rows with a fixed header; cells are already formatted.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Table { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Everything a subcommand produces.
#[derive(Debug)]
pub struct Report {
    pub results: Map<String, Value>,
    pub table: Table,
    /// False when some membership test (or condition) failed.
    pub success: bool,
    pub default_format: Format,
}

pub fn cell_f64(x: f64) -> String {
    if x.is_finite() {
        // Shortest representation that parses back to the same value.
        let v = serde_json::Value::from(x);
        v.to_string()
    } else {
        x.to_string()
    }
}

pub fn cell_opt(x: Option<f64>) -> String {
    x.map(cell_f64).unwrap_or_default()
}

pub fn write(report: &Report, config: &Value, format: Format, path: Option<&Path>) -> Result<(), CliError> {
    let mut sink: Box<dyn Write> = match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match format {
        Format::Json => {
            let mut doc = Map::new();
            doc.insert("version".into(), VERSION.into());
            doc.insert("config".into(), config.clone());
            for (k, v) in &report.results {
                doc.insert(k.clone(), v.clone());
            }
            serde_json::to_writer_pretty(&mut sink, &Value::Object(doc))?;
            writeln!(sink)?;
        }
        Format::Csv => {
            writeln!(sink, "# cubature v{VERSION} config={}", serde_json::to_string(config)?)?;
            let mut w = csv::Writer::from_writer(&mut sink);
            w.write_record(&report.table.header)?;
            for row in &report.table.rows {
                w.write_record(row)?;
            }
            w.flush()?;
        }
    }
    sink.flush()?;
    Ok(())
}
