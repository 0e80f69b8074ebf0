//! File formats: JSON Lines and JSON documents whose records all carry a
//! `schema_version` field, plus CSV tables.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {source}")]
    Json { path: PathBuf, line: usize, source: serde_json::Error },
    #[error("{path}:{line}: unsupported schema_version {found} (expected {SCHEMA_VERSION})")]
    SchemaVersion { path: PathBuf, line: usize, found: u32 },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}

impl IoError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        IoError::Io { path: path.to_path_buf(), source }
    }
}

#[derive(Serialize)]
struct VersionedRef<'a, T> {
    schema_version: u32,
    #[serde(flatten)]
    record: &'a T,
}

#[derive(Deserialize)]
struct Versioned<T> {
    #[serde(default = "current_version")]
    schema_version: u32,
    #[serde(flatten)]
    record: T,
}

fn current_version() -> u32 {
    SCHEMA_VERSION
}

/// One-line JSON encoding of `record` with `schema_version` first.
pub fn to_versioned_line<T: Serialize>(record: &T) -> serde_json::Result<String> {
    serde_json::to_string(&VersionedRef { schema_version: SCHEMA_VERSION, record })
}

pub fn to_versioned_value<T: Serialize>(record: &T) -> serde_json::Result<serde_json::Value> {
    serde_json::to_value(VersionedRef { schema_version: SCHEMA_VERSION, record })
}

fn parse_line<T: DeserializeOwned>(text: &str, path: &Path, line: usize) -> Result<T, IoError> {
    let v: Versioned<T> =
        serde_json::from_str(text).map_err(|source| IoError::Json { path: path.to_path_buf(), line, source })?;
    if v.schema_version != SCHEMA_VERSION {
        return Err(IoError::SchemaVersion { path: path.to_path_buf(), line, found: v.schema_version });
    }
    Ok(v.record)
}

fn create(path: &Path) -> Result<BufWriter<File>, IoError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| IoError::io(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| IoError::io(path, e))
}

pub fn write_jsonl<'a, T: Serialize + 'a>(path: &Path, records: impl IntoIterator<Item = &'a T>) -> Result<(), IoError> {
    let mut w = create(path)?;
    for r in records {
        let line = to_versioned_line(r).map_err(|source| IoError::Json { path: path.to_path_buf(), line: 0, source })?;
        writeln!(w, "{line}").map_err(|e| IoError::io(path, e))?;
    }
    w.flush().map_err(|e| IoError::io(path, e))
}

/// Reads every non-blank line. A missing file reads as empty when
/// `missing_ok`.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path, missing_ok: bool) -> Result<Vec<T>, IoError> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if missing_ok && e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(IoError::io(path, e)),
    };
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| IoError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_line(&line, path, i + 1)?);
    }
    Ok(out)
}

/// Appends one record and flushes it to the operating system.
pub fn append_jsonl<T: Serialize>(path: &Path, record: &T) -> Result<(), IoError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| IoError::io(dir, e))?;
    }
    let mut f = OpenOptions::new().create(true).append(true).open(path).map_err(|e| IoError::io(path, e))?;
    let line = to_versioned_line(record).map_err(|source| IoError::Json { path: path.to_path_buf(), line: 0, source })?;
    f.write_all(format!("{line}\n").as_bytes()).map_err(|e| IoError::io(path, e))?;
    f.flush().map_err(|e| IoError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, record: &T) -> Result<(), IoError> {
    let mut w = create(path)?;
    let value = to_versioned_value(record).map_err(|source| IoError::Json { path: path.to_path_buf(), line: 0, source })?;
    serde_json::to_writer_pretty(&mut w, &value).map_err(|source| IoError::Json { path: path.to_path_buf(), line: 0, source })?;
    writeln!(w).map_err(|e| IoError::io(path, e))?;
    w.flush().map_err(|e| IoError::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    let text = fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    parse_line(&text, path, 1)
}

pub fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), IoError> {
    let csv_err = |source| IoError::Csv { path: path.to_path_buf(), source };
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| IoError::io(path, e))
}
