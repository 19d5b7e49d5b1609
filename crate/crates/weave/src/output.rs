//! Output directory bookkeeping: CSV tables, SVG plots, and the manifest
//! that lists them.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{Map, Value};

use weave_core::linalg::CMatrix;

use crate::error::{CliError, Result};
use crate::io::write_canonical;

/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "WEAVE_OUT";

#[derive(Clone, Debug, Serialize)]
pub struct FileEntry {
    pub path: String,
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    version: u32,
    command: &'a str,
    parameters: &'a Map<String, Value>,
    files: &'a [FileEntry],
    /// Kept apart so everything above is reproducible.
    generated_unix_s: u64,
}

pub struct OutputDir {
    root: PathBuf,
    command: &'static str,
    parameters: Map<String, Value>,
    files: Vec<FileEntry>,
}

impl OutputDir {
    pub fn create(root: &Path, command: &'static str) -> Result<Self> {
        fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(OutputDir {
            root: root.to_path_buf(),
            command,
            parameters: Map::new(),
            files: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) {
        self.parameters.insert(key.to_owned(), value.into());
    }

    fn push(&mut self, name: &str, kind: &'static str, rows: Option<usize>) -> PathBuf {
        self.files.push(FileEntry {
            path: name.to_owned(),
            kind,
            rows,
        });
        self.root.join(name)
    }

    /// Lists a file the caller writes itself.
    pub fn record(&mut self, name: &str, kind: &'static str) -> PathBuf {
        self.push(name, kind, None)
    }

    pub fn csv(&mut self, name: &str, header: &[String], rows: &[Vec<f64>]) -> Result<PathBuf> {
        let path = self.push(name, "csv", Some(rows.len()));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(row.iter().map(|x| format!("{x:.12e}")))?;
        }
        w.flush().map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }

    /// CSV with string cells, for tables that mix labels and numbers.
    pub fn csv_records(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf> {
        let path = self.push(name, "csv", Some(rows.len()));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush().map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }

    pub fn text(&mut self, name: &str, kind: &'static str, body: &str) -> Result<PathBuf> {
        let path = self.push(name, kind, None);
        fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let path = self.push(name, "json", None);
        write_canonical(&path, value)?;
        Ok(path)
    }

    pub fn finish(self) -> Result<PathBuf> {
        let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        let m = Manifest {
            version: 1,
            command: self.command,
            parameters: &self.parameters,
            files: &self.files,
            generated_unix_s: stamp,
        };
        let path = self.root.join("manifest.json");
        write_canonical(&path, &m)?;
        Ok(path)
    }
}

/// Row-major complex pairs, one matrix row per line.
pub fn matrix_dump(m: &CMatrix) -> String {
    let mut s = format!("# {} x {} complex, rad/us, re im pairs\n", m.nrows(), m.ncols());
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|c| {
                let z = m[(r, c)];
                format!("{:.15e} {:.15e}", z.re, z.im)
            })
            .collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

/// `t` column followed by one column per series.
pub fn time_table(times: &[f64], columns: &[Vec<f64>]) -> Vec<Vec<f64>> {
    times
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let mut row = Vec::with_capacity(columns.len() + 1);
            row.push(t);
            row.extend(columns.iter().map(|c| c[i]));
            row
        })
        .collect()
}
