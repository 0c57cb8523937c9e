//! CSV and JSON writers. Numbers use 17 significant digits so that values
//! round-trip and golden files diff cleanly.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, CliResult};

pub fn fmt_num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "NaN".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// Header line and rows; a missing value is written as `NaN`.
pub fn csv_string(header: &[&str], rows: &[Vec<Option<f64>>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| fmt_num(v.unwrap_or(f64::NAN))).collect();
        let _ = writeln!(s, "{}", cells.join(","));
    }
    s
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    }
    fs::write(path, text).map_err(CliError::io(path))
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<Option<f64>>]) -> CliResult<()> {
    write_text(path, &csv_string(header, rows))
}

pub fn write_json<S: Serialize>(path: &Path, value: &S) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable output");
    text.push('\n');
    write_text(path, &text)
}

/// Provenance written next to every CSV file.
#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub version: &'static str,
    pub config_hash: String,
    pub command: String,
    pub columns: Vec<String>,
    pub rows: usize,
}

impl Meta {
    pub fn new(config_hash: String, command: impl Into<String>, columns: &[&str], rows: usize) -> Self {
        Self {
            version: optomech::VERSION,
            config_hash,
            command: command.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows,
        }
    }
}

pub fn meta_path(csv: &Path) -> PathBuf {
    let mut name = csv.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".meta.json");
    csv.with_file_name(name)
}

/// Writes `rows` to `path` and the provenance sidecar next to it.
pub fn write_csv_with_meta(
    path: &Path,
    header: &[&str],
    rows: &[Vec<Option<f64>>],
    config_hash: &str,
    command: &str,
) -> CliResult<()> {
    write_csv(path, header, rows)?;
    write_json(&meta_path(path), &Meta::new(config_hash.to_string(), command, header, rows.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 0.0] {
            let s = fmt_num(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
            let mantissa = s.trim_start_matches('-').split('e').next().unwrap();
            assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17, "{s}");
        }
        assert_eq!(fmt_num(f64::INFINITY), "inf");
        assert_eq!(fmt_num(f64::NAN), "NaN");
    }

    #[test]
    fn csv_layout() {
        let s = csv_string(&["tau", "x"], &[vec![Some(0.0), Some(1.5)], vec![Some(1.0), None]]);
        assert_eq!(
            s,
            "tau,x\n0.0000000000000000e0,1.5000000000000000e0\n1.0000000000000000e0,NaN\n"
        );
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(meta_path(Path::new("out/a.csv")), PathBuf::from("out/a.csv.meta.json"));
    }
}
