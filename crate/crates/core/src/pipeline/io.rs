//! File helpers: atomic writes and CSV tables carrying a provenance comment.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

/// Writes through a sibling temporary file and a rename, so readers never
/// see a half-written file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    fs::write(&tmp, bytes).map_err(|e| Error::io(Path::new(&tmp), e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// A CSV file held in memory: header plus string cells.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Manifest hash from the provenance line, if any.
    pub manifest_hash: Option<String>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), ..Default::default() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::validation(format!("missing CSV column {name:?}")))
    }

    pub fn f64_at(&self, row: usize, col: usize) -> Result<f64> {
        parse_f64(&self.rows[row][col])
    }

    pub fn usize_at(&self, row: usize, col: usize) -> Result<usize> {
        let cell = &self.rows[row][col];
        cell.parse().map_err(|_| Error::validation(format!("expected an integer, found {cell:?}")))
    }

    /// Serialises with a leading `# <tool> manifest=<hash>` line when a hash is set.
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        if let Some(h) = &self.manifest_hash {
            out.extend_from_slice(format!("# {TOOL_VERSION} manifest={h}\n").as_bytes());
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| Error::validation(format!("CSV buffer: {e}")))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.to_bytes()?)
    }

    pub fn parse(text: &str) -> Result<Table> {
        let manifest_hash = text
            .lines()
            .next()
            .and_then(|l| l.strip_prefix('#'))
            .and_then(|l| l.split_whitespace().find_map(|w| w.strip_prefix("manifest=")))
            .map(str::to_string);
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let header = r.headers()?.iter().map(str::to_string).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(str::to_string).collect()))
            .collect::<std::result::Result<_, _>>()?;
        Ok(Table { header, rows, manifest_hash })
    }

    pub fn read(path: &Path) -> Result<Table> {
        Table::parse(&read_to_string(path)?)
    }
}

pub fn parse_f64(cell: &str) -> Result<f64> {
    cell.trim().parse().map_err(|_| Error::validation(format!("expected a number, found {cell:?}")))
}

/// Shortest representation that reads back to the same value.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub fn join_f64(vs: &[f64]) -> String {
    vs.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(";")
}

pub fn split_f64(cell: &str) -> Result<Vec<f64>> {
    if cell.is_empty() {
        return Ok(Vec::new());
    }
    cell.split(';').map(parse_f64).collect()
}

/// JSON document with a provenance envelope.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Stamped<T> {
    pub tool: String,
    pub manifest_hash: String,
    pub content: T,
}

impl<T: Serialize + DeserializeOwned> Stamped<T> {
    pub fn new(manifest_hash: &str, content: T) -> Self {
        Stamped { tool: TOOL_VERSION.to_string(), manifest_hash: manifest_hash.to_string(), content }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        write_atomic(path, text.as_bytes())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&read_to_string(path)?)?)
    }
}
