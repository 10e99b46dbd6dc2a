//! Deterministic artifact writers. Floats are rendered in scientific
//! notation with 16 significant digits ('.' decimal separator), CSV rows
//! end with '\n', and JSON objects serialize with sorted keys, so
//! identical inputs produce byte-identical files. Every numeric cell is
//! checked for finiteness before anything is written; a NaN or infinity
//! anywhere aborts the command.

use crate::errors::CliError;
use std::fs;
use std::path::{Path, PathBuf};

/// 16 significant digits: one leading digit plus 15 decimals.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.15e}")
}

/// A numeric cell destined for a CSV file; rejects non-finite values at
/// construction time with the file/column named in the error.
pub fn finite(x: f64, file: &str, column: &str) -> Result<f64, CliError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::Numerical(format!("non-finite value ({x}) for column '{column}' of {file}")))
    }
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(&format!("creating {}", dir.display()), e))
}

pub fn write_csv(
    dir: &Path,
    name: &str,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    let mut w = csv::Writer::from_path(&path)
        .map_err(|e| CliError::io(&format!("creating {}", path.display()), e))?;
    w.write_record(header).map_err(|e| CliError::io("writing csv header", e))?;
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        w.write_record(row).map_err(|e| CliError::io("writing csv row", e))?;
    }
    w.flush().map_err(|e| CliError::io(&format!("flushing {}", path.display()), e))?;
    Ok(path)
}

pub fn write_json(dir: &Path, name: &str, value: &serde_json::Value) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    let mut text =
        serde_json::to_string_pretty(value).map_err(|e| CliError::io("serializing json", e))?;
    text.push('\n');
    fs::write(&path, text).map_err(|e| CliError::io(&format!("writing {}", path.display()), e))?;
    Ok(path)
}

/// JSON number that fails loudly on NaN/infinity instead of serializing
/// to null.
pub fn json_num(x: f64, context: &str) -> Result<serde_json::Value, CliError> {
    serde_json::Number::from_f64(x)
        .map(serde_json::Value::Number)
        .ok_or_else(|| CliError::Numerical(format!("non-finite value ({x}) in {context}")))
}
