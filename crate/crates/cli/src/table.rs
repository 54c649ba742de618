//! Tabular output in text, CSV or JSON.

use std::io::Write;

use anyhow::Result;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Num(f64),
    Text(String),
    Null,
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Null, Into::into)
    }
}

/// Named columns, rows of cells and a free-form metadata block that only the
/// JSON rendering carries.
#[derive(Debug, Clone)]
pub struct OutputTable {
    pub command: &'static str,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub digits: usize,
    pub meta: Map<String, Value>,
}

impl OutputTable {
    pub fn new(command: &'static str, columns: Vec<String>, digits: usize) -> Self {
        Self {
            command,
            columns,
            rows: Vec::new(),
            digits,
            meta: Map::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn meta(&mut self, key: &str, value: impl Into<Value>) {
        self.meta.insert(key.to_string(), value.into());
    }

    fn cell_text(&self, cell: &Cell) -> String {
        match cell {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => format!("{:.*}", self.digits, v),
            Cell::Text(s) => s.clone(),
            Cell::Null => String::new(),
        }
    }

    pub fn render(&self, format: Format, out: &mut impl Write) -> Result<()> {
        match format {
            Format::Text => self.render_text(out),
            Format::Csv => self.render_csv(out),
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, &self.to_json())?;
                writeln!(out)?;
                Ok(())
            }
        }
    }

    fn render_text(&self, out: &mut impl Write) -> Result<()> {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|c| self.cell_text(c)).collect())
            .collect();
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|j| {
                cells
                    .iter()
                    .map(|r| r[j].len())
                    .chain([self.columns[j].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        // Text columns align left, everything else right.
        let left: Vec<bool> = (0..self.columns.len())
            .map(|j| self.rows.iter().any(|r| matches!(r[j], Cell::Text(_))))
            .collect();
        let line = |fields: &[String]| -> String {
            let parts: Vec<String> = fields
                .iter()
                .enumerate()
                .map(|(j, f)| {
                    if left[j] {
                        format!("{f:<w$}", w = widths[j])
                    } else {
                        format!("{f:>w$}", w = widths[j])
                    }
                })
                .collect();
            parts.join("  ").trim_end().to_string()
        };
        writeln!(out, "{}", line(&self.columns))?;
        for row in &cells {
            writeln!(out, "{}", line(row))?;
        }
        Ok(())
    }

    fn render_csv(&self, out: &mut impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| self.cell_text(c)))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Rows become objects keyed by column name; numbers keep full precision
    /// and absent cells are `null`.
    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(name, cell)| {
                        let v = match cell {
                            Cell::Int(v) => json!(v),
                            Cell::Num(v) if v.is_finite() => json!(v),
                            Cell::Num(_) | Cell::Null => Value::Null,
                            Cell::Text(s) => json!(s),
                        };
                        (name.clone(), v)
                    })
                    .collect();
                Value::Object(obj)
            })
            .collect();
        json!({
            "command": self.command,
            "columns": self.columns,
            "rows": rows,
            "meta": self.meta,
        })
    }
}
