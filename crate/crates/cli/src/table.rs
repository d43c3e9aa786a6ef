//! Result tables and their CSV and JSON encodings.
//!
//! CSV files start with `# key: value` metadata lines, then a header row of
//! `name (unit)` cells, then one record per row with every value written to
//! 17 significant digits. The JSON form is `{metadata, columns, rows}` with
//! non-finite values as `null`. Both encodings are byte-stable for a given
//! table and convert into each other without loss.

use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    /// Empty for dimensionless columns.
    pub unit: String,
}

impl Column {
    pub fn new(name: &str, unit: &str) -> Self {
        Self { name: name.into(), unit: unit.into() }
    }

    fn header(&self) -> String {
        if self.unit.is_empty() {
            self.name.clone()
        } else {
            format!("{} ({})", self.name, self.unit)
        }
    }

    fn from_header(cell: &str) -> Self {
        match cell.strip_suffix(')').and_then(|s| s.rsplit_once(" (")) {
            Some((name, unit)) => Column::new(name, unit),
            None => Column::new(cell, ""),
        }
    }
}

/// Column every table ends with; 1 for a converged row, 0 otherwise.
pub const CONVERGED: &str = "converged";

/// Metadata key holding the wall-clock time, the only line allowed to differ
/// between two runs of the same config.
pub const TIMESTAMP_KEY: &str = "timestamp";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    /// Ordered key/value pairs. Values must be single-line.
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed table: {0}")]
    Malformed(String),
}

#[derive(Serialize, Deserialize)]
struct JsonTable {
    metadata: serde_json::Map<String, Value>,
    columns: Vec<Column>,
    rows: Vec<Vec<Option<f64>>>,
}

impl SweepTable {
    pub fn new(columns: Vec<Column>) -> Self {
        Self { metadata: Vec::new(), columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Values of one column, by name.
    pub fn values(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column(name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn all_converged(&self) -> bool {
        match self.column(CONVERGED) {
            Some(i) => self.rows.iter().all(|r| r[i] == 1.0),
            None => true,
        }
    }

    pub fn check(&self) -> Result<(), TableError> {
        for (i, c) in self.columns.iter().enumerate() {
            if self.columns[..i].iter().any(|d| d.name == c.name) {
                return Err(TableError::Malformed(format!("duplicate column \"{}\"", c.name)));
            }
        }
        if let Some(r) = self.rows.iter().position(|r| r.len() != self.columns.len()) {
            return Err(TableError::Malformed(format!("row {r} has the wrong width")));
        }
        if self.metadata.iter().any(|(k, v)| k.contains(':') || k.contains('\n') || v.contains('\n')) {
            return Err(TableError::Malformed("metadata must be single-line with no ':' in keys".into()));
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<(), TableError> {
        self.check()?;
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}: {v}")?;
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(self.columns.iter().map(Column::header))?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format_value(*v)))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(text: &str) -> Result<Self, TableError> {
        let mut metadata = Vec::new();
        for line in text.lines().take_while(|l| l.starts_with('#')) {
            let body = line.strip_prefix("# ").unwrap_or(&line[1..]);
            let (k, v) = body
                .split_once(": ")
                .ok_or_else(|| TableError::Malformed(format!("metadata line without key: {line}")))?;
            metadata.push((k.to_string(), v.to_string()));
        }
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let columns = r.headers()?.iter().map(Column::from_header).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|c| c.parse::<f64>().map_err(|_| TableError::Malformed(format!("bad number \"{c}\""))))
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        let t = Self { metadata, columns, rows };
        t.check()?;
        Ok(t)
    }

    pub fn to_json(&self) -> Result<String, TableError> {
        self.check()?;
        let metadata = self.metadata.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
        let rows = self.rows.iter().map(|r| r.iter().map(|v| v.is_finite().then_some(*v)).collect()).collect();
        let mut s = serde_json::to_string_pretty(&JsonTable { metadata, columns: self.columns.clone(), rows })?;
        s.push('\n');
        Ok(s)
    }

    /// Inverse of [`SweepTable::to_json`]; `null` reads back as NaN.
    pub fn read_json(text: &str) -> Result<Self, TableError> {
        let j: JsonTable = serde_json::from_str(text)?;
        let metadata = j
            .metadata
            .into_iter()
            .map(|(k, v)| match v {
                Value::String(s) => Ok((k, s)),
                other => Err(TableError::Malformed(format!("metadata {k} is not a string: {other}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let rows = j.rows.into_iter().map(|r| r.into_iter().map(|v| v.unwrap_or(f64::NAN)).collect()).collect();
        let t = Self { metadata, columns: j.columns, rows };
        t.check()?;
        Ok(t)
    }

    pub fn emit(&self, format: crate::config::Format, path: Option<&Path>) -> Result<(), TableError> {
        let bytes = match format {
            crate::config::Format::Csv => {
                let mut buf = Vec::new();
                self.write_csv(&mut buf)?;
                buf
            }
            crate::config::Format::Json => self.to_json()?.into_bytes(),
        };
        match path {
            Some(p) => std::fs::write(p, bytes)?,
            None => io::stdout().lock().write_all(&bytes)?,
        }
        Ok(())
    }
}

/// 17 significant digits, enough to round-trip any f64. Infinities are
/// written as NaN so that the CSV and JSON forms carry the same values.
fn format_value(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "NaN".into()
    }
}
