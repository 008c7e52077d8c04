//! Tabular output shared by the CLI: CSV with a header row and JSON with a
//! versioned schema tag. Numbers go through [`fmt_num`] in both renderings,
//! so the two always carry the same values.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};

pub const REPORT_SCHEMA: &str = "qgame.report/v1";
pub const ASSERTIONS_SCHEMA: &str = "qgame.assertions/v1";

/// Significant digits of every number written by the CLI.
pub const SIG_DIGITS: usize = 12;

/// Formats like C's `%.12g`: fixed notation for moderate exponents,
/// scientific otherwise, trailing zeros removed. `-0` prints as `0`.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= SIG_DIGITS as i32 {
        return format!(
            "{}e{}{:02}",
            trim_zeros(mantissa),
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        );
    }
    let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// The value a reader recovers from [`fmt_num`].
pub fn rounded(x: f64) -> f64 {
    fmt_num(x).parse().unwrap_or(x)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt_num(*x),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => json!(rounded(*x)),
            Cell::Num(x) => json!(fmt_num(*x)),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width must match the header"
        );
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))
                .map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "columns": self.columns,
            "rows": self.rows.iter().map(|r| r.iter().map(Cell::to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// One command's output: tables plus free-form details that only appear in
/// the JSON rendering.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: String,
    pub tables: Vec<Table>,
    pub details: Map<String, Value>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            tables: Vec::new(),
            details: Map::new(),
        }
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.tables.push(table);
        self
    }

    pub fn detail(&mut self, key: &str, value: Value) {
        self.details.insert(key.to_string(), round_numbers(value));
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn to_json(&self) -> Value {
        let mut tables = Map::new();
        for t in &self.tables {
            tables.insert(t.name.clone(), t.to_json());
        }
        let mut out = Map::new();
        out.insert("schema".into(), json!(REPORT_SCHEMA));
        out.insert("command".into(), json!(self.command));
        out.insert("tables".into(), Value::Object(tables));
        if !self.details.is_empty() {
            out.insert("details".into(), Value::Object(self.details.clone()));
        }
        Value::Object(out)
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("json values serialize");
        s.push('\n');
        s
    }

    /// CSV of every table, separated by a blank line when there are several.
    pub fn to_csv(&self) -> Result<String> {
        let parts: Result<Vec<String>> = self.tables.iter().map(Table::to_csv).collect();
        Ok(parts?.join("\n"))
    }
}

/// Applies [`rounded`] to every number inside a JSON value.
pub fn round_numbers(value: Value) -> Value {
    match value {
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => json!(rounded(x)),
            _ => Value::Number(n),
        },
        Value::Array(v) => Value::Array(v.into_iter().map(round_numbers).collect()),
        Value::Object(m) => {
            Value::Object(m.into_iter().map(|(k, v)| (k, round_numbers(v))).collect())
        }
        other => other,
    }
}

/// A single machine-checkable claim about a reproduced artifact.
#[derive(Clone, Debug, PartialEq)]
pub struct Assertion {
    pub id: String,
    pub description: String,
    pub expected: f64,
    pub actual: f64,
    pub tolerance: f64,
}

impl Assertion {
    pub fn new(
        id: impl Into<String>,
        description: impl Into<String>,
        expected: f64,
        actual: f64,
        tolerance: f64,
    ) -> Self {
        Self {
            id: id.into(),
            description: description.into(),
            expected,
            actual,
            tolerance,
        }
    }

    /// A yes/no claim stored as 1 (expected) against 0 or 1.
    pub fn holds(id: impl Into<String>, description: impl Into<String>, ok: bool) -> Self {
        Self::new(id, description, 1.0, if ok { 1.0 } else { 0.0 }, 0.0)
    }

    pub fn passed(&self) -> bool {
        (self.actual - self.expected).abs() <= self.tolerance
    }
}

pub fn assertions_json(target: &str, assertions: &[Assertion]) -> String {
    let items: Vec<Value> = assertions
        .iter()
        .map(|a| {
            json!({
                "id": a.id,
                "description": a.description,
                "expected": rounded(a.expected),
                "actual": rounded(a.actual),
                "tolerance": a.tolerance,
                "pass": a.passed(),
            })
        })
        .collect();
    let doc = json!({
        "schema": ASSERTIONS_SCHEMA,
        "target": target,
        "all_pass": assertions.iter().all(Assertion::passed),
        "assertions": items,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("json values serialize");
    s.push('\n');
    s
}

/// Reads back a CSV written by [`Table::to_csv`]; numbers become `Num`.
pub fn parse_csv(name: &str, text: &str) -> Result<Table> {
    let mut r = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let columns: Vec<String> = r
        .headers()
        .map_err(|e| Error::Parse(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        rows.push(
            rec.iter()
                .map(|s| match s {
                    "true" => Cell::Bool(true),
                    "false" => Cell::Bool(false),
                    _ => s
                        .parse::<f64>()
                        .map(Cell::Num)
                        .unwrap_or_else(|_| Cell::Text(s.to_string())),
                })
                .collect(),
        );
    }
    Ok(Table {
        name: name.to_string(),
        columns,
        rows,
    })
}
