//! Report and field serialization.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::Field;
use crate::scalar::Real;

/// Version of the JSON envelope written by every subcommand.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Envelope<'a, C: Serialize, R: Serialize> {
    pub schema_version: u32,
    pub command: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<&'a C>,
    pub result: &'a R,
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Pretty JSON with a trailing newline. Keys follow struct declaration
/// order, so identical inputs give identical bytes.
pub fn to_json<R: Serialize>(report: &R) -> Result<String> {
    let mut s =
        serde_json::to_string_pretty(report).map_err(|e| Error::Configuration(format!("report serialization: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn write_report<R: Serialize>(report: &R, path: &Path) -> Result<()> {
    let text = to_json(report)?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    fs::write(path, text).map_err(|e| io_err(path, e))
}

pub fn write_field<T: Real>(field: &Field<T>, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    field.save_csv(path)
}

/// Write `header` and rows of numbers as CSV.
pub fn write_table<W: Write>(out: W, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|v| format!("{v:e}")))?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_table(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| io_err(path, e))?;
    write_table(file, header, rows).map_err(|e| io_err(path, std::io::Error::other(e.to_string())))
}
