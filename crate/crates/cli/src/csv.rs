//! Comma-separated tables with a header row and LF line endings. Numbers
//! use nine significant digits in scientific notation.

use std::fmt::Write;

pub fn num(v: f64) -> String {
    format!("{v:.8e}")
}

/// Quotes a text cell when it holds a separator, quote or newline.
pub fn text(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    out: String,
    columns: usize,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut t = Self {
            out: String::new(),
            columns: header.len(),
        };
        t.push_raw(header.iter().map(|h| text(h)).collect());
        t
    }

    fn push_raw(&mut self, cells: Vec<String>) {
        assert_eq!(cells.len(), self.columns, "row width");
        let _ = writeln!(self.out, "{}", cells.join(","));
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.push_raw(cells);
    }

    pub fn numbers(&mut self, values: &[f64]) {
        self.push_raw(values.iter().map(|&v| num(v)).collect());
    }

    pub fn finish(self) -> String {
        self.out
    }
}
