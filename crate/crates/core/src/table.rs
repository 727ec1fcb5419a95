use std::fmt::Write as _;
use std::io;
use std::path::Path;

/// Fixed-width scientific notation with 17 significant digits, enough to
/// round-trip any `f64`.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// A CSV table of floats with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file_name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(file_name: impl Into<String>, header: &[&'static str]) -> Self {
        Self { file_name: file_name.into(), header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Comma separated, LF line endings, one header line.
    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{}", format_float(*v));
            }
            out.push('\n');
        }
        out
    }

    pub fn write_to(&self, dir: &Path) -> io::Result<()> {
        std::fs::write(dir.join(&self.file_name), self.to_csv())
    }
}
