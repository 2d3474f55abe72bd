//! File formats: a JSON cell list, a CSV grid with empty fields for empty
//! cells, and a Markdown table for documents.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{Cell, Dims, GridError, PartialArray};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("line {line}, field {field}: {text:?} is not an integer")]
    BadEntry { line: usize, field: usize, text: String },
    #[error("{0}")]
    Shape(String),
    #[error("modulus {found} does not match 2nk+1 = {expected}")]
    Modulus { found: i64, expected: i64 },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellEntry {
    pub row: usize,
    pub col: usize,
    pub value: i64,
}

/// JSON form of an array. `m` and `h` default to `n` and `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrayFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<usize>,
    pub k: usize,
    pub modulus: i64,
    pub cells: Vec<CellEntry>,
}

impl ArrayFile {
    pub fn from_array(array: &PartialArray) -> Self {
        let d = array.dims();
        let square = d.is_square();
        Self {
            m: (!square).then_some(d.m),
            n: d.n,
            h: (!square).then_some(d.h),
            k: d.k,
            modulus: d.modulus(),
            cells: array
                .iter()
                .map(|(c, value)| CellEntry {
                    row: c.row,
                    col: c.col,
                    value,
                })
                .collect(),
        }
    }

    pub fn to_array(&self) -> Result<PartialArray, FormatError> {
        let dims = Dims::new(
            self.m.unwrap_or(self.n),
            self.n,
            self.h.unwrap_or(self.k),
            self.k,
        )?;
        if self.modulus != dims.modulus() {
            return Err(FormatError::Modulus {
                found: self.modulus,
                expected: dims.modulus(),
            });
        }
        let mut array = PartialArray::new(dims);
        for e in &self.cells {
            array.insert(Cell::new(e.row, e.col), e.value)?;
        }
        Ok(array)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Table,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "table" | "md" | "markdown" => Ok(Format::Table),
            other => Err(format!("unknown format {other:?} (expected json, csv or table)")),
        }
    }
}

/// Pretty JSON with cells sorted by `(row, col)`, newline-terminated.
pub fn to_json(array: &PartialArray) -> String {
    let mut s = serde_json::to_string_pretty(&ArrayFile::from_array(array)).expect("plain data");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> Result<PartialArray, FormatError> {
    serde_json::from_str::<ArrayFile>(text)?.to_array()
}

pub fn to_csv(array: &PartialArray) -> String {
    let mut out = String::new();
    for row in array.to_grid() {
        let fields: Vec<String> = row
            .iter()
            .map(|v| v.map(|x| x.to_string()).unwrap_or_default())
            .collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// Reads an `m x n` grid; `k = filled / n` and `h = filled / m` must be exact.
pub fn from_csv(text: &str) -> Result<PartialArray, FormatError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut grid: Vec<Vec<Option<i64>>> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = record
            .iter()
            .enumerate()
            .map(|(j, field)| {
                if field.is_empty() {
                    Ok(None)
                } else {
                    field.parse().map(Some).map_err(|_| FormatError::BadEntry {
                        line: i + 1,
                        field: j + 1,
                        text: field.to_string(),
                    })
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        grid.push(row);
    }
    let m = grid.len();
    let n = grid.first().map_or(0, Vec::len);
    if m == 0 || n == 0 {
        return Err(FormatError::Shape("empty grid".into()));
    }
    let filled: usize = grid.iter().map(|r| r.iter().flatten().count()).sum();
    if !filled.is_multiple_of(n) || !filled.is_multiple_of(m) {
        return Err(FormatError::Shape(format!(
            "{filled} filled cells do not divide evenly over a {m}x{n} grid"
        )));
    }
    let dims = Dims::new(m, n, filled / m, filled / n)?;
    Ok(PartialArray::from_grid(dims, &grid)?)
}

/// Markdown table with blank cells for empty positions.
pub fn to_table(array: &PartialArray) -> String {
    let d = array.dims();
    let mut out = String::from("|");
    for c in 1..=d.n {
        let _ = write!(out, " {c} |");
    }
    out.push_str("\n|");
    out.push_str(&"---:|".repeat(d.n));
    out.push('\n');
    for row in array.to_grid() {
        out.push('|');
        for v in row {
            match v {
                Some(x) => {
                    let _ = write!(out, " {x} |");
                }
                None => out.push_str("  |"),
            }
        }
        out.push('\n');
    }
    out
}

pub fn emit(array: &PartialArray, format: Format) -> String {
    match format {
        Format::Json => to_json(array),
        Format::Csv => to_csv(array),
        Format::Table => to_table(array),
    }
}

/// JSON if the first non-blank character is `{`, CSV otherwise.
pub fn parse_array(text: &str) -> Result<PartialArray, FormatError> {
    if text.trim_start().starts_with('{') {
        from_json(text)
    } else {
        from_csv(text)
    }
}

pub fn read_array(path: &Path) -> Result<PartialArray, FormatError> {
    let text = std::fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_array(&text)
}
