//! One report, three renderings: pretty JSON, CSV rows, aligned table.

use anyhow::Result;
use serde::Serialize;
use serde_json::Value;

use crate::Format;

pub struct Report {
    pub json: Value,
    /// Header first; used for csv and table output.
    pub rows: Vec<Vec<String>>,
    /// Lines printed above the table, such as verdicts.
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(json: &impl Serialize, header: &[&str]) -> Result<Self> {
        Ok(Self {
            json: serde_json::to_value(json)?,
            rows: vec![header.iter().map(|h| h.to_string()).collect()],
            notes: Vec::new(),
        })
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => Ok(serde_json::to_string_pretty(&self.json)? + "\n"),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                for r in &self.rows {
                    w.write_record(r)?;
                }
                Ok(String::from_utf8(w.into_inner()?)?)
            }
            Format::Table => Ok(self.table()),
        }
    }

    fn table(&self) -> String {
        let cols = self.rows.iter().map(|r| r.len()).max().unwrap_or(0);
        let widths: Vec<usize> = (0..cols)
            .map(|c| self.rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for n in &self.notes {
            out.push_str(n);
            out.push('\n');
        }
        for (k, r) in self.rows.iter().enumerate() {
            let cells: Vec<String> = r.iter().zip(&widths).map(|(s, &w)| format!("{s:<w$}")).collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
            if k == 0 {
                let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
                out.push_str(&rule.join("  "));
                out.push('\n');
            }
        }
        out
    }
}
