//! Delimited text tables with a `#`-prefixed metadata header.
//!
//! The on-disk format is deliberately plain: every metadata line starts with
//! `# `, the last of them names the columns, and the body is tab-separated
//! numbers in a fixed `{:.12e}` rendering so identical runs produce identical
//! bytes.

use std::fs;
use std::path::Path;

use super::RunnerError;

/// Numeric result table plus free-form metadata lines.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub metadata: Vec<String>,
}

impl ResultTable {
    pub fn new<S: Into<String>>(columns: Vec<S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
            metadata: Vec::new(),
        }
    }

    pub fn push_metadata(&mut self, line: impl Into<String>) {
        self.metadata.push(line.into());
    }

    /// Append a data row; the length must match the column count.
    pub fn push_row(&mut self, row: Vec<f64>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width must match the declared columns"
        );
        self.rows.push(row);
    }

    /// Render to the full text form (metadata, column header, data rows).
    pub fn render(&self) -> String {
        let mut out = String::new();
        for line in &self.metadata {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out.push_str("# columns: ");
        out.push_str(&self.columns.join("\t"));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| format_value(v)).collect();
            out.push_str(&cells.join("\t"));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<(), RunnerError> {
        fs::write(path, self.render()).map_err(|source| RunnerError::IoFailure {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// Fixed-width scientific rendering; negative zero is folded onto +0 so
/// equal values always print identically.
pub fn format_value(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.12e}")
}
