//! CSV datasets, checksums and atomic output.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::RunError;

/// Fixed-width scientific notation with 9 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.8e}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// In-memory CSV table.
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        writer.write_record(header).expect("in-memory write");
        Self { writer }
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).expect("in-memory write");
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.writer.into_inner().expect("in-memory flush")
    }
}

/// Named output files of one command, in name order.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Dataset {
    pub files: BTreeMap<String, Vec<u8>>,
}

impl Dataset {
    pub fn add(&mut self, name: impl Into<String>, table: Table) {
        self.files.insert(name.into(), table.into_bytes());
    }

    pub fn checksums(&self) -> Vec<OutputEntry> {
        self.files
            .iter()
            .map(|(name, bytes)| OutputEntry {
                path: name.clone(),
                sha256: sha256_hex(bytes),
                bytes: bytes.len(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OutputEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub scenario_id: String,
    pub scenario_source: String,
    pub input_sha256: String,
    pub scenario: serde_json::Value,
    pub seed_override: Option<u64>,
    pub outputs: Vec<OutputEntry>,
    pub wall_clock_s: f64,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), RunError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(path))?;
    tmp.write_all(bytes).map_err(io_err(path))?;
    tmp.as_file().sync_all().map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| io_err(path)(e.error))?;
    Ok(())
}

/// Writes every dataset file, then the manifest, under `dir`. Returns the
/// manifest path.
pub fn write_dataset(dir: &Path, data: &Dataset, manifest: &Manifest) -> Result<PathBuf, RunError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    for (name, bytes) in &data.files {
        write_atomic(&dir.join(name), bytes)?;
    }
    let path = dir.join(format!("{}.manifest.json", manifest.command));
    let mut json = serde_json::to_vec_pretty(manifest).expect("manifest serializes");
    json.push(b'\n');
    write_atomic(&path, &json)?;
    Ok(path)
}
