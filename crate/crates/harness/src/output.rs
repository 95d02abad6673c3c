//! Output tables and their CSV/JSON encodings.
//!
//! CSV floats use `{:.16e}` (17 significant digits, enough to round-trip
//! any `f64`), so file digests are stable across platforms. JSON output is
//! an array of row objects (keys sorted, as serde_json maps are). The `dat`
//! format writes the CSV cells space-separated under a `# ` header, ready
//! for gnuplot.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::{Format, HarnessError};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Uint(u64),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Uint(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(v) => v.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Uint(v) => Value::from(*v),
            Cell::Float(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Bool(v) => Value::Bool(*v),
            Cell::Text(v) => Value::String(v.clone()),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Uint(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Uint(v)
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
        Cell::Text(v.to_string())
    }
}

pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// A named table with a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&'static str]) -> Self {
        Table {
            name: name.into(),
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len(), "row width for {}", self.name);
        self.rows.push(row);
    }

    pub fn file_name(&self, format: Format) -> String {
        match format {
            Format::Csv => format!("{}.csv", self.name),
            Format::Json => format!("{}.json", self.name),
            Format::Dat => format!("{}.dat", self.name),
        }
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))
                .expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }

    pub fn to_json(&self) -> Vec<u8> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (key, cell) in self.header.iter().zip(row) {
                    obj.insert((*key).to_string(), cell.json());
                }
                Value::Object(obj)
            })
            .collect();
        let mut bytes = serde_json::to_vec_pretty(&Value::Array(rows)).expect("json encodes");
        bytes.push(b'\n');
        bytes
    }

    pub fn to_dat(&self) -> Vec<u8> {
        let mut out = format!("# {}\n", self.header.join(" "));
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| c.csv().replace(char::is_whitespace, "_"))
                .collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out.into_bytes()
    }

    pub fn encode(&self, format: Format) -> Vec<u8> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
            Format::Dat => self.to_dat(),
        }
    }
}

/// A file to emit: a table in the run's format or a standalone JSON
/// document.
#[derive(Debug, Clone)]
pub enum Artifact {
    Table(Table),
    Document { name: String, value: Value },
}

impl Artifact {
    pub fn document(name: &str, value: &impl serde::Serialize) -> Self {
        Artifact::Document {
            name: format!("{name}.json"),
            value: serde_json::to_value(value).expect("serializable"),
        }
    }

    pub fn file_name(&self, format: Format) -> String {
        match self {
            Artifact::Table(t) => t.file_name(format),
            Artifact::Document { name, .. } => name.clone(),
        }
    }

    pub fn encode(&self, format: Format) -> Vec<u8> {
        match self {
            Artifact::Table(t) => t.encode(format),
            Artifact::Document { value, .. } => {
                let mut bytes = serde_json::to_vec_pretty(value).expect("json encodes");
                bytes.push(b'\n');
                bytes
            }
        }
    }
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    fs::write(path, bytes).map_err(HarnessError::io(path))
}

/// Reads one named float column from a headed CSV file.
pub fn read_column(path: &Path, column: &str) -> Result<Vec<f64>, HarnessError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    let idx = headers.iter().position(|h| h == column).ok_or_else(|| {
        HarnessError::Config(format!("{}: no column named `{column}`", path.display()))
    })?;
    let mut values = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let raw = record.get(idx).unwrap_or("");
        let v: f64 = raw.trim().parse().map_err(|_| {
            HarnessError::Config(format!(
                "{}: row {} has non-numeric `{column}` value `{raw}`",
                path.display(),
                line + 1
            ))
        })?;
        values.push(v);
    }
    Ok(values)
}

fn csv_error(path: &Path, e: csv::Error) -> HarnessError {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(source) => HarnessError::Io {
                path: PathBuf::from(path),
                source,
            },
            _ => unreachable!("checked is_io_error"),
        }
    } else {
        HarnessError::Config(format!("{}: {e}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23] {
            let s = format_float(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
        assert_eq!(format_float(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn csv_and_json_encodings() {
        let mut t = Table::new("demo", &["i", "x", "ok", "tag"]);
        t.push(vec![
            Cell::from(1usize),
            Cell::from(0.5),
            Cell::from(true),
            Cell::from("a,b"),
        ]);
        let csv = String::from_utf8(t.to_csv()).unwrap();
        assert_eq!(csv, "i,x,ok,tag\n1,5.0000000000000000e-1,true,\"a,b\"\n");
        let json: Value = serde_json::from_slice(&t.to_json()).unwrap();
        assert_eq!(json[0]["x"], 0.5);
        assert_eq!(t.file_name(Format::Json), "demo.json");
        let dat = String::from_utf8(t.to_dat()).unwrap();
        assert_eq!(dat, "# i x ok tag\n1 5.0000000000000000e-1 true a,b\n");
    }
}
