//! CSV tables and JSON summaries with byte-stable formatting.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde_json::{Map, Value};

pub const SCHEMA: &str = "1";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    B(bool),
    S(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::I(x as i64)
    }
}

impl From<i32> for Cell {
    fn from(x: i32) -> Self {
        Cell::I(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::B(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::F)
    }
}

/// 17 significant digits in scientific notation.
pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(x) => fmt_float(*x),
            Cell::I(i) => i.to_string(),
            Cell::B(b) => b.to_string(),
            Cell::S(s) => {
                if s.contains([',', '"', '\n']) {
                    format!("\"{}\"", s.replace('"', "\"\""))
                } else {
                    s.clone()
                }
            }
            Cell::Empty => String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// Empty for the command's main table, else a file-name suffix.
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table {
            name: name.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_header(name: &str, header: Vec<String>) -> Self {
        Table {
            name: name.into(),
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            let line: Vec<String> = r.iter().map(Cell::render).collect();
            let _ = writeln!(s, "{}", line.join(","));
        }
        s
    }
}

/// Column names `prefix0, prefix1, ...`.
pub fn columns(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

pub fn floats(xs: &[f64]) -> Vec<Cell> {
    xs.iter().map(|x| Cell::F(*x)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub pass: bool,
    pub result: Map<String, Value>,
    pub tables: Vec<Table>,
    pub operations: Vec<&'static str>,
}

impl Report {
    pub fn json(&self) -> String {
        let mut m = Map::new();
        m.insert("schema".into(), Value::from(SCHEMA));
        m.insert("command".into(), Value::from(self.command.clone()));
        m.insert("pass".into(), Value::from(self.pass));
        m.insert(
            "operations".into(),
            Value::from(self.operations.iter().map(|s| s.to_string()).collect::<Vec<_>>()),
        );
        m.insert("result".into(), Value::Object(self.result.clone()));
        let mut s = serde_json::to_string_pretty(&Value::Object(m)).expect("json values serialize");
        s.push('\n');
        s
    }

    pub fn file_name(&self, t: &Table) -> String {
        if t.name.is_empty() {
            format!("{}.csv", self.command)
        } else {
            format!("{}_{}.csv", self.command, t.name)
        }
    }

    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        fs::create_dir_all(dir)?;
        for t in &self.tables {
            fs::write(dir.join(self.file_name(t)), t.to_csv())?;
        }
        fs::write(dir.join(format!("{}.json", self.command)), self.json())
    }
}
