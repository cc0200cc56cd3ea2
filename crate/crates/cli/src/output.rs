//! Deterministic CSV (RFC 4180) and JSON-lines table emission.

use std::io::Write;
use std::path::Path;

use anyhow::Context;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Jsonl,
}

/// One table cell.
#[derive(Debug, Clone)]
pub enum Cell {
    Str(String),
    Int(i64),
    /// Fixed-precision scientific notation (9 significant decimals).
    Num(f64),
    /// Plain decimal formatting for axis-like values.
    Axis(f64),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Str(s) => csv_quote(s),
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => format!("{x:.9e}"),
            Cell::Axis(x) => format!("{x}"),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Str(s) => serde_json::Value::String(s.clone()),
            Cell::Int(i) => serde_json::Value::from(*i),
            Cell::Num(x) | Cell::Axis(x) => serde_json::Value::from(*x),
            Cell::Empty => serde_json::Value::Null,
        }
    }
}

fn csv_quote(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// A fully assembled table; the column order is the emission order.
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: OutputFormat) -> String {
        let mut out = String::new();
        match format {
            OutputFormat::Csv => {
                out.push_str(&self.columns.join(","));
                out.push_str("\r\n");
                for row in &self.rows {
                    let line: Vec<String> = row.iter().map(Cell::csv).collect();
                    out.push_str(&line.join(","));
                    out.push_str("\r\n");
                }
            }
            OutputFormat::Jsonl => {
                for row in &self.rows {
                    let obj: serde_json::Map<String, serde_json::Value> = self
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| (c.to_string(), v.json()))
                        .collect();
                    out.push_str(&serde_json::Value::Object(obj).to_string());
                    out.push('\n');
                }
            }
        }
        out
    }

    pub fn write(&self, format: OutputFormat, output: Option<&Path>) -> anyhow::Result<()> {
        let rendered = self.render(format);
        match output {
            Some(path) => std::fs::write(path, rendered)
                .with_context(|| format!("writing {}", path.display()))?,
            None => {
                std::io::stdout().write_all(rendered.as_bytes()).context("writing stdout")?;
            }
        }
        Ok(())
    }
}

pub fn opt_num(v: Option<f64>) -> Cell {
    match v {
        Some(x) => Cell::Num(x),
        None => Cell::Empty,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quoting_and_layout() {
        let mut t = Table::new(vec!["a", "b"]);
        t.push(vec![Cell::Str("x,y".into()), Cell::Num(1.5)]);
        let s = t.render(OutputFormat::Csv);
        assert_eq!(s, "a,b\r\n\"x,y\",1.500000000e0\r\n");
    }

    #[test]
    fn jsonl_nulls() {
        let mut t = Table::new(vec!["a", "b"]);
        t.push(vec![Cell::Empty, Cell::Int(3)]);
        assert_eq!(t.render(OutputFormat::Jsonl), "{\"a\":null,\"b\":3}\n");
    }
}
