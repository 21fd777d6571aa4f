//! CSV, JSON and gnuplot writers. Every writer produces bytes that depend only
//! on its input.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;
use crate::experiment::config::Axis;

pub const TRACE_FILE: &str = "trace.csv";
pub const SWEEP_FILE: &str = "sweep.csv";
pub const VERIFY_FILE: &str = "verify.json";
pub const OPTIMIZE_FILE: &str = "optimize.json";

/// Writes `rows` with a header line to `<dir>/<name>`, creating `dir`.
pub fn write_csv<T: Serialize>(dir: &Path, name: &str, rows: &[T]) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let mut w = csv::Writer::from_path(&path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(path)
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| crate::Error::InvalidArgument(e.to_string()))?;
    text.push('\n');
    fs::write(&path, text)?;
    Ok(path)
}

/// Gnuplot script plotting `crb_db` of `sweep.csv` against the axis, one
/// curve per scheme.
pub fn sweep_gnuplot(axis: Axis, schemes: &[&str]) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str(&format!("set xlabel '{}'\nset ylabel 'CRB (dB rad^2)'\nset key top right\n", axis.name()));
    let curves: Vec<String> = schemes
        .iter()
        .map(|k| {
            format!(
                "'{SWEEP_FILE}' using 1:(strcol(2) eq '{k}' ? $5 : 1/0) with linespoints title '{k}'"
            )
        })
        .collect();
    s.push_str(&format!("plot {}\n", curves.join(", \\\n     ")));
    s
}

pub fn trace_gnuplot(schemes: &[&str]) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set xlabel 'iteration'\nset ylabel 'CRB (dB rad^2)'\nset key top right\n");
    let curves: Vec<String> = schemes
        .iter()
        .map(|k| format!("'{TRACE_FILE}' using 2:(strcol(1) eq '{k}' ? $5 : 1/0) with lines title '{k}'"))
        .collect();
    s.push_str(&format!("plot {}\n", curves.join(", \\\n     ")));
    s
}
