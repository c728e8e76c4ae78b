//! Table rendering: aligned text, CSV (header row, LF) and JSON lines.

use std::io::{self, Write};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Human,
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(BigUint),
    /// Exact fraction such as `2/3`.
    Fraction(String),
    /// A real already rendered to 12 significant digits.
    Real(String),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    pub fn int(x: impl Into<BigUint>) -> Self {
        Cell::Int(x.into())
    }

    pub fn opt<T>(x: Option<T>, f: impl FnOnce(T) -> Cell) -> Self {
        x.map(f).unwrap_or(Cell::Empty)
    }

    pub fn text(&self) -> String {
        match self {
            Cell::Int(x) => x.to_string(),
            Cell::Fraction(s) | Cell::Real(s) | Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(x) => match x.to_u64() {
                Some(v) => Value::Number(v.into()),
                None => Value::String(x.to_string()),
            },
            // keep the 12-digit rendering when f64 cannot hold it
            Cell::Real(s) => match s.parse::<f64>().ok().and_then(Number::from_f64) {
                Some(n) if n.as_f64().is_some_and(|v| v != 0.0 || s == "0") => Value::Number(n),
                _ => Value::String(s.clone()),
            },
            Cell::Fraction(s) | Cell::Text(s) => Value::String(s.clone()),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Empty => Value::Null,
        }
    }
}

/// Column names plus rows of cells, one cell per column.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write(&self, format: Format, out: &mut impl Write) -> io::Result<()> {
        match format {
            Format::Human => self.write_human(out),
            Format::Csv => self.write_csv(out),
            Format::Json => self
                .rows
                .iter()
                .try_for_each(|row| write_json_row(&self.columns, row, out)),
        }
    }

    fn write_human(&self, out: &mut impl Write) -> io::Result<()> {
        let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(Cell::text).collect()).collect();
        let widths: Vec<usize> = self
            .columns
            .iter()
            .enumerate()
            .map(|(i, c)| {
                cells
                    .iter()
                    .map(|r| r[i].chars().count())
                    .chain([c.len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |parts: Vec<&str>| {
            let padded: Vec<String> = parts.iter().zip(&widths).map(|(p, w)| format!("{p:>w$}")).collect();
            padded.join("  ").trim_end().to_string()
        };
        writeln!(out, "{}", line(self.columns.clone()))?;
        for row in &cells {
            writeln!(out, "{}", line(row.iter().map(String::as_str).collect()))?;
        }
        Ok(())
    }

    fn write_csv(&self, out: &mut impl Write) -> io::Result<()> {
        write_csv_line(self.columns.iter().map(|c| c.to_string()), out)?;
        for row in &self.rows {
            write_csv_line(row.iter().map(Cell::text), out)?;
        }
        Ok(())
    }
}

pub fn write_json_row(columns: &[&str], row: &[Cell], out: &mut impl Write) -> io::Result<()> {
    let mut obj = Map::new();
    for (c, v) in columns.iter().zip(row) {
        obj.insert(c.to_string(), v.json());
    }
    serde_json::to_writer(&mut *out, &Value::Object(obj))?;
    out.write_all(b"\n")
}

fn write_csv_line(cells: impl Iterator<Item = String>, out: &mut impl Write) -> io::Result<()> {
    let quoted: Vec<String> = cells
        .map(|c| {
            if c.contains([',', '"', '\n', '\r']) {
                format!("\"{}\"", c.replace('"', "\"\""))
            } else {
                c
            }
        })
        .collect();
    out.write_all(quoted.join(",").as_bytes())?;
    out.write_all(b"\n")
}

/// Bounds shown in human output, rounded to two decimals.
pub fn two_decimals(x: f64) -> String {
    format!("{x:.2}")
}
