//! Result tables, run manifests and the CSV/JSON writers.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

/// Bumped whenever a column or field changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub parameters: BTreeMap<String, String>,
    pub seed: u64,
    pub artifact_version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl RunManifest {
    pub fn new(subcommand: &str, seed: u64, timestamp: u64) -> Self {
        RunManifest {
            subcommand: subcommand.to_owned(),
            parameters: BTreeMap::new(),
            seed,
            artifact_version: format!("balanced-gaps {} schema {SCHEMA_VERSION}", env!("CARGO_PKG_VERSION")),
            timestamp,
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.parameters.insert(key.to_owned(), value.to_string());
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i128),
    Float(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v.into())
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v.into())
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i128)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

/// A computed result: a JSON document plus a flat table for CSV.
#[derive(Clone, Debug)]
pub struct Report {
    pub json: Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn new(json: Value, header: Vec<&'static str>) -> Self {
        Report { json, header, rows: Vec::new() }
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    /// Name of the first column holding a NaN or infinity, if any.
    pub fn non_finite_column(&self) -> Option<&'static str> {
        self.rows.iter().find_map(|row| {
            row.iter().zip(&self.header).find_map(|(c, &h)| match c {
                Cell::Float(x) if !x.is_finite() => Some(h),
                _ => None,
            })
        })
    }
}

/// Fixed-point rendering with 15 significant digits, switching to
/// exponent notation outside `[1e-5, 1e15)`. Trailing zeros are trimmed.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".to_owned();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let decimals = (14 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_owned()
        } else {
            s
        }
    } else {
        let s = format!("{x:.14e}");
        let (mant, e) = s.split_once('e').expect("exponent form");
        let mant = if mant.contains('.') { mant.trim_end_matches('0').trim_end_matches('.') } else { mant };
        format!("{mant}e{e}")
    }
}

fn render(cell: &Cell) -> String {
    match cell {
        Cell::Int(v) => v.to_string(),
        Cell::Float(v) => format_float(*v),
        Cell::Text(s) => s.clone(),
        Cell::Bool(b) => b.to_string(),
        Cell::Empty => String::new(),
    }
}

pub fn to_csv(manifest: &RunManifest, report: &Report) -> Result<Vec<u8>, String> {
    let mut buf = Vec::new();
    let line = serde_json::to_string(manifest).map_err(|e| e.to_string())?;
    buf.extend_from_slice(format!("# manifest: {line}\n").as_bytes());
    let mut w = csv::Writer::from_writer(buf);
    w.write_record(&report.header).map_err(|e| e.to_string())?;
    for row in &report.rows {
        w.write_record(row.iter().map(render)).map_err(|e| e.to_string())?;
    }
    w.into_inner().map_err(|e| e.to_string())
}

pub fn to_json(manifest: &RunManifest, report: &Report) -> Result<Vec<u8>, String> {
    let doc = serde_json::json!({ "manifest": manifest, "result": report.json });
    let mut out = serde_json::to_vec_pretty(&doc).map_err(|e| e.to_string())?;
    out.push(b'\n');
    Ok(out)
}
