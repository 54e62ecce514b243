//! Result tables, the Monte Carlo audit and on-disk output.

use crate::config::{ExperimentConfig, TableFormat};
use crate::error::{AppError, AppResult};
use sectorcap_core::montecarlo::Estimate;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Standard errors allowed between an analytic value and its estimate.
pub const AUDIT_SE: f64 = 3.0;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as u64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

/// Shortest round-trip decimal; scientific outside `[1e-4, 1e15)`.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

/// A row whose simulated value disagrees with the analytic one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditFlag {
    pub row: usize,
    pub quantity: String,
    pub analytic: f64,
    pub mc: f64,
    pub se: f64,
    pub allowed: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Audit {
    pub checks: usize,
    pub flags: Vec<AuditFlag>,
}

/// One comparison: passes when `|mc - analytic| <= 3 se + slack`.
pub fn agrees(analytic: f64, est: &Estimate, slack: f64) -> bool {
    (est.value - analytic).abs() <= AUDIT_SE * est.se + slack
}

impl Audit {
    /// Records one comparison and returns whether it passed.
    pub fn check(&mut self, row: usize, quantity: &str, analytic: f64, est: &Estimate, slack: f64) -> bool {
        self.checks += 1;
        let ok = agrees(analytic, est, slack);
        if !ok {
            self.flags.push(AuditFlag {
                row,
                quantity: quantity.to_string(),
                analytic,
                mc: est.value,
                se: est.se,
                allowed: AUDIT_SE * est.se + slack,
            });
        }
        ok
    }

    pub fn absorb(&mut self, other: Audit) {
        self.checks += other.checks;
        self.flags.extend(other.flags);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub audit: Audit,
}

impl Table {
    pub fn new(name: &str, columns: &[&'static str]) -> Self {
        Self { name: name.to_string(), columns: columns.to_vec(), rows: Vec::new(), audit: Audit::default() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "table {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    /// Numeric column values, in row order.
    pub fn floats(&self, name: &str) -> Vec<f64> {
        let Some(k) = self.column(name) else { return Vec::new() };
        self.rows
            .iter()
            .filter_map(|r| match r[k] {
                Cell::Float(v) => Some(v),
                Cell::Int(v) => Some(v as f64),
                _ => None,
            })
            .collect()
    }

    pub fn to_bytes(&self, format: TableFormat) -> AppResult<Vec<u8>> {
        let mut w = csv::WriterBuilder::new().delimiter(format.delimiter()).from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.into_inner().map_err(|e| AppError::io("<table buffer>", e.into_error()))
    }
}

/// Git object id of `bytes` in the SHA-256 object format
/// (`sha256("blob <len>\0" ++ bytes)`).
pub fn content_id(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    let mut out = String::with_capacity(64);
    for b in h.finalize() {
        let _ = write!(out, "{b:02x}");
    }
    out
}

#[derive(Serialize)]
struct Sidecar<'a> {
    table: &'a str,
    file: String,
    rows: usize,
    columns: &'a [&'static str],
    seed: u64,
    content_id: String,
    generator: String,
    audit: &'a Audit,
    config: &'a ExperimentConfig,
}

/// Writes `<dir>/<name>.<ext>` and its metadata record `<dir>/<name>.json`;
/// returns the table path.
pub fn write_table(table: &Table, cfg: &ExperimentConfig, seed: u64, dir: &Path) -> AppResult<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
    let format = cfg.output.format;
    let bytes = table.to_bytes(format)?;
    let file = format!("{}.{}", table.name, format.extension());
    let path = dir.join(&file);
    std::fs::write(&path, &bytes).map_err(|e| AppError::io(&path, e))?;

    let meta = Sidecar {
        table: &table.name,
        file,
        rows: table.rows.len(),
        columns: &table.columns,
        seed,
        content_id: content_id(&bytes),
        generator: format!("sectorcap {}", env!("CARGO_PKG_VERSION")),
        audit: &table.audit,
        config: cfg,
    };
    let mut json = serde_json::to_string_pretty(&meta).map_err(|e| AppError::io(dir, e.into()))?;
    json.push('\n');
    let meta_path = dir.join(format!("{}.json", table.name));
    std::fs::write(&meta_path, json).map_err(|e| AppError::io(&meta_path, e))?;
    Ok(path)
}
