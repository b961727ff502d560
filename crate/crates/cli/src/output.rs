//! Table assembly and file emission.
//!
//! Every command produces a [`Table`]; this module renders it as CSV (full
//! double precision, 17 significant digits, bit-stable round trips) or as a
//! JSON document `{"manifest": ..., "data": ...}`, and drops a manifest
//! sidecar next to CSV outputs. Checksums cover the data payload only, so
//! identical inputs give identical checksums regardless of timestamps.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

/// One table cell.
#[derive(Clone, Copy, Debug)]
pub enum Cell {
    Int(i64),
    Float(f64),
    /// Rendered empty in CSV and null in JSON (e.g. winding skipped on the
    /// guard band).
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => fmt_float(*v),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Int(v) => serde_json::Value::from(*v),
            // infinities have no JSON representation; they become null
            Cell::Float(v) => serde_json::Number::from_f64(*v)
                .map(serde_json::Value::Number)
                .unwrap_or(serde_json::Value::Null),
            Cell::Empty => serde_json::Value::Null,
        }
    }
}

/// Full-precision float formatting: 17 significant digits round-trip f64
/// exactly.
pub fn fmt_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// Column-named rows produced by a command.
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn csv_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            debug_assert_eq!(row.len(), self.columns.len());
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn json_data(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: serde_json::Map<String, serde_json::Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, cell)| (c.to_string(), cell.json()))
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::Value::Array(rows)
    }
}

/// Run metadata emitted alongside every output file.
#[derive(Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub timestamp: String,
    /// Effective parameter set, after config and defaults.
    pub parameters: BTreeMap<String, serde_json::Value>,
    /// SHA-256 of the data payload (CSV bytes, or the serialized JSON data
    /// array). Timestamps never enter the checksum.
    pub data_sha256: String,
    #[serde(skip_serializing_if = "serde_json::Map::is_empty")]
    pub extra: serde_json::Map<String, serde_json::Value>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn now_rfc3339() -> String {
    chrono::Utc::now().to_rfc3339()
}

/// Output format of the data file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Write the table to `out` (or stdout) and its manifest alongside.
pub fn emit(
    command: &str,
    table: &Table,
    parameters: BTreeMap<String, serde_json::Value>,
    extra: serde_json::Map<String, serde_json::Value>,
    out: Option<&Path>,
    format: Format,
) -> Result<(), CliError> {
    let manifest = |checksum: String| RunManifest {
        command: command.to_string(),
        version: fockskin::VERSION.to_string(),
        timestamp: now_rfc3339(),
        parameters,
        data_sha256: checksum,
        extra,
    };
    match format {
        Format::Csv => {
            let payload = table.csv_string();
            let manifest = manifest(sha256_hex(payload.as_bytes()));
            match out {
                Some(path) => {
                    std::fs::write(path, &payload)?;
                    let sidecar = manifest_path(path);
                    std::fs::write(&sidecar, serde_json::to_string_pretty(&manifest)? + "\n")?;
                }
                None => {
                    std::io::stdout().write_all(payload.as_bytes())?;
                }
            }
        }
        Format::Json => {
            let data = table.json_data();
            let manifest = manifest(sha256_hex(serde_json::to_string(&data)?.as_bytes()));
            let doc = serde_json::json!({
                "manifest": serde_json::to_value(&manifest)?,
                "data": data,
            });
            let payload = serde_json::to_string_pretty(&doc)? + "\n";
            match out {
                Some(path) => std::fs::write(path, &payload)?,
                None => std::io::stdout().write_all(payload.as_bytes())?,
            }
        }
    }
    Ok(())
}

/// `<out>.manifest.json` next to the data file.
pub fn manifest_path(out: &Path) -> std::path::PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}
