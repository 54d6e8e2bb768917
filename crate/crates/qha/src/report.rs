//! Tabular results and their JSON and CSV renderings.

use serde_json::{Map, Value};

use crate::config::Format;
use crate::error::{Result, RunError};

/// Shortest round-trip scientific notation; `inf`, `-inf` and `nan` spelled out.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:e}")
    }
}

pub fn fmt_exponent(p: f64) -> String {
    if p.is_infinite() {
        "inf".into()
    } else {
        format!("{p}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    /// An exponent, printed as `inf` for `p = ∞`.
    Exp(f64),
    Int(u64),
    Text(String),
    Flag(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => fmt_num(*v),
            Cell::Exp(p) => fmt_exponent(*p),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Flag(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) | Cell::Exp(v) if !v.is_finite() => Value::String(fmt_num(*v)),
            Cell::Num(v) | Cell::Exp(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Int(v) => Value::from(*v),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Flag(b) => Value::Bool(*b),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Flag(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&'static str]) -> Self {
        Self { name: name.into(), columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| RunError::format("csv output", e);
        w.write_record(&self.columns).map_err(err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| RunError::format("csv output", e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self.columns.iter().zip(row).map(|(c, v)| (c.to_string(), v.json())).collect();
                Value::Object(obj)
            })
            .collect();
        Value::Array(rows)
    }

    /// Fixed-width text rendering for terminals.
    pub fn to_text(&self) -> String {
        let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(Cell::csv).collect()).collect();
        let widths: Vec<usize> = self
            .columns
            .iter()
            .enumerate()
            .map(|(k, c)| cells.iter().map(|r| r[k].chars().count()).chain([c.len()]).max().unwrap_or(0))
            .collect();
        let line = |vals: Vec<&str>| {
            vals.iter().zip(&widths).map(|(v, w)| format!("{v:<w$}")).collect::<Vec<_>>().join("  ").trim_end().to_string()
        };
        let mut out = line(self.columns.clone());
        out.push('\n');
        for r in &cells {
            out.push_str(&line(r.iter().map(String::as_str).collect()));
            out.push('\n');
        }
        out
    }
}

/// Outcome of one experiment: the primary table (the CSV payload), any
/// supplementary tables, and the names of failed assertions.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub experiment: &'static str,
    pub seed: u64,
    pub primary: Table,
    pub extra: Vec<Table>,
    pub failures: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.primary.to_csv(),
            Format::Json => {
                let mut obj = Map::new();
                obj.insert("experiment".into(), Value::String(self.experiment.into()));
                obj.insert("seed".into(), Value::from(self.seed));
                obj.insert("passed".into(), Value::Bool(self.passed()));
                obj.insert("failures".into(), Value::Array(self.failures.iter().cloned().map(Value::String).collect()));
                obj.insert(self.primary.name.clone(), self.primary.to_json());
                for t in &self.extra {
                    obj.insert(t.name.clone(), t.to_json());
                }
                let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("report serializes");
                s.push('\n');
                Ok(s)
            }
        }
    }
}
