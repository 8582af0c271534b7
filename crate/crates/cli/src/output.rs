//! CSV artifacts: a `# ` header block, a column line, then numbers in
//! shortest round-trip form.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::CliError;

fn io(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub fn write_csv(path: &Path, header: &str, columns: &[&str], rows: &[Vec<f64>]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    }
    let mut file = File::create(path).map_err(|e| io(path, e))?;
    file.write_all(header.as_bytes()).map_err(|e| io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(columns).map_err(|e| io(path, e))?;
    for r in rows {
        w.write_record(r.iter().map(|v| format!("{v}"))).map_err(|e| io(path, e))?;
    }
    w.flush().map_err(|e| io(path, e))
}

/// Column names and numeric rows of an artifact, skipping its header block.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>), CliError> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path).map_err(|e| io(path, e))?;
    let columns = r.headers().map_err(|e| io(path, e))?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| io(path, e))?;
        let row: Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        rows.push(row.map_err(|e| io(path, e))?);
    }
    Ok((columns, rows))
}

/// Index of column `name`.
pub fn column(columns: &[String], name: &str) -> Result<usize, CliError> {
    columns.iter().position(|c| c == name).ok_or_else(|| CliError::Config(format!("artifact has no `{name}` column")))
}
