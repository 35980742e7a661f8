//! Collected command outputs, written only once the command has succeeded.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Default)]
pub struct Outputs {
    files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Data(e.to_string()))?;
        s.push('\n');
        self.add(name, s.into_bytes());
        Ok(())
    }

    /// Numeric table; values use shortest round-trip formatting.
    pub fn table(&mut self, name: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<(), CliError> {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        wtr.write_record(header).map_err(|e| CliError::Data(e.to_string()))?;
        for r in rows {
            wtr.write_record(r.iter().map(|v| v.to_string())).map_err(|e| CliError::Data(e.to_string()))?;
        }
        let bytes = wtr.into_inner().map_err(|e| CliError::Data(e.to_string()))?;
        self.add(name, bytes);
        Ok(())
    }

    pub fn write_with<F>(&mut self, name: &str, f: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut Vec<u8>) -> Result<(), ringtrap::data::DataError>,
    {
        let mut buf = Vec::new();
        f(&mut buf)?;
        self.add(name, buf);
        Ok(())
    }

    /// Writes every file next to its destination, then renames them into place.
    /// On failure the temporaries are removed and nothing is left behind.
    pub fn commit(self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        fs::create_dir_all(dir)?;
        let pid = std::process::id();
        let mut staged: Vec<(PathBuf, PathBuf)> = Vec::with_capacity(self.files.len());
        let cleanup = |staged: &[(PathBuf, PathBuf)]| {
            for (tmp, _) in staged {
                let _ = fs::remove_file(tmp);
            }
        };
        for (name, bytes) in &self.files {
            let dest = dir.join(name);
            let tmp = dir.join(format!(".{name}.{pid}.tmp"));
            if let Err(e) = fs::write(&tmp, bytes) {
                cleanup(&staged);
                let _ = fs::remove_file(&tmp);
                return Err(e.into());
            }
            staged.push((tmp, dest));
        }
        let mut written = Vec::with_capacity(staged.len());
        for (i, (tmp, dest)) in staged.iter().enumerate() {
            if let Err(e) = fs::rename(tmp, dest) {
                cleanup(&staged[i..]);
                for d in &written {
                    let _ = fs::remove_file(d);
                }
                return Err(e.into());
            }
            written.push(dest.clone());
        }
        Ok(written)
    }
}

/// Rows from equal-length columns.
pub fn columns(cols: &[&[f64]]) -> Vec<Vec<f64>> {
    let n = cols.first().map_or(0, |c| c.len());
    (0..n).map(|i| cols.iter().map(|c| c[i]).collect()).collect()
}
