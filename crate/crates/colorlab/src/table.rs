//! CSV documents with `#`-prefixed header lines.
//!
//! Cells are strings; numbers are formatted with Rust's shortest
//! round-tripping representation, so parsing a document back gives the same
//! values bit for bit.

use std::fmt::Display;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len(), "row width differs from the header");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Cell `name` of row `i`.
    pub fn get(&self, i: usize, name: &str) -> Option<&str> {
        Some(self.rows.get(i)?.get(self.column(name)?)?.as_str())
    }
}

pub fn cell(x: impl Display) -> String {
    x.to_string()
}

/// Empty for `None`.
pub fn opt_cell<T: Display>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Document {
    /// `# key: value` lines, in order.
    pub header: Vec<(String, String)>,
    pub table: Table,
}

#[derive(Debug, thiserror::Error)]
#[error("malformed CSV document: {0}")]
pub struct ParseError(String);

impl Document {
    pub fn new(header: Vec<(String, String)>, table: Table) -> Self {
        Self { header, table }
    }

    pub fn header_value(&self, key: &str) -> Option<&str> {
        self.header.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// The CSV part alone; what determinism is judged on.
    pub fn body(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.table.columns).expect("in-memory write");
        for row in &self.table.rows {
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("cells are UTF-8")
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.header {
            debug_assert!(!v.contains('\n'));
            out.push_str(&format!("# {k}: {v}\n"));
        }
        out.push_str(&self.body());
        out
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut header = Vec::new();
        let mut body_start = 0;
        for line in text.split_inclusive('\n') {
            let Some(rest) = line.strip_prefix('#') else { break };
            let rest = rest.trim_end_matches('\n').trim_start();
            let (k, v) = rest
                .split_once(": ")
                .ok_or_else(|| ParseError(format!("header line without key: {line:?}")))?;
            header.push((k.to_string(), v.to_string()));
            body_start += line.len();
        }
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(&text.as_bytes()[body_start..]);
        let columns = r
            .headers()
            .map_err(|e| ParseError(e.to_string()))?
            .iter()
            .map(String::from)
            .collect();
        let mut table = Table {
            columns,
            rows: Vec::new(),
        };
        for rec in r.records() {
            let rec = rec.map_err(|e| ParseError(e.to_string()))?;
            table.rows.push(rec.iter().map(String::from).collect());
        }
        Ok(Self { header, table })
    }
}
