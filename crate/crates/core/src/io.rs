//! CSV and JSON sidecar output.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};

/// Writes equal-length columns under a one-line header, 17 significant digits, LF endings.
pub fn write_csv(path: &Path, header: &[&str], columns: &[&[f64]]) -> Result<()> {
    if header.len() != columns.len() {
        return Err(Error::Contract(format!("{} headers for {} columns", header.len(), columns.len())));
    }
    let rows = columns.first().map_or(0, |c| c.len());
    if columns.iter().any(|c| c.len() != rows) {
        return Err(Error::Contract("CSV columns differ in length".into()));
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{}", header.join(","))?;
    let mut line = String::new();
    for i in 0..rows {
        line.clear();
        for (c, col) in columns.iter().enumerate() {
            if c > 0 {
                line.push(',');
            }
            // adding zero folds −0 into +0
            line.push_str(&format!("{:.16e}", col[i] + 0.0));
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// `<path>.meta.json`
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Reads a numeric CSV written by [`write_csv`].
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header: Vec<String> =
        lines.next().unwrap_or_default().split(',').map(str::to_owned).collect();
    let mut cols = vec![Vec::new(); header.len()];
    for (n, line) in lines.enumerate() {
        for (c, field) in line.split(',').enumerate() {
            let v = field
                .parse::<f64>()
                .map_err(|e| Error::Contract(format!("{}:{}: {e}", path.display(), n + 2)))?;
            cols.get_mut(c)
                .ok_or_else(|| Error::Contract(format!("{}:{}: too many fields", path.display(), n + 2)))?
                .push(v);
        }
    }
    Ok((header, cols))
}
