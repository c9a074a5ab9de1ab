use std::fmt::Write as _;

use chaingamma_core::json::{ComplexMatrixJson, ExactMatrixJson};
use chaingamma_core::numerics::PrecComplexMatrix;
use chaingamma_core::RationalMatrix;
use clap::ValueEnum;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

/// One command's output in every supported format.
pub struct Rendered {
    pub json: Value,
    pub csv: Vec<Vec<String>>,
    pub table: String,
}

impl Rendered {
    pub fn emit(&self, format: Format) -> Result<String, String> {
        match format {
            Format::Json => serde_json::to_string_pretty(&self.json)
                .map(|s| s + "\n")
                .map_err(|e| e.to_string()),
            Format::Csv => {
                let mut w = csv::WriterBuilder::new().flexible(true).from_writer(vec![]);
                for row in &self.csv {
                    w.write_record(row).map_err(|e| e.to_string())?;
                }
                let bytes = w.into_inner().map_err(|e| e.to_string())?;
                String::from_utf8(bytes).map_err(|e| e.to_string())
            }
            Format::Table => Ok(self.table.clone()),
        }
    }
}

/// Left-aligned columns separated by two spaces.
pub fn table(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut widths = vec![0; cols];
    for r in rows {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    for r in rows {
        let cells: Vec<String> = r
            .iter()
            .zip(&widths)
            .map(|(cell, &w)| format!("{cell:<w$}"))
            .collect();
        let _ = writeln!(out, "{}", cells.join("  ").trim_end());
    }
    out
}

pub fn exact_matrix(name: &str, m: &RationalMatrix) -> Rendered {
    let j = ExactMatrixJson::new(name, m);
    let mut rows = vec![std::iter::once(String::new()).chain(j.labels.iter().cloned()).collect::<Vec<_>>()];
    for (label, r) in j.labels.iter().zip(&j.entries) {
        rows.push(std::iter::once(label.clone()).chain(r.iter().cloned()).collect());
    }
    let mut csv = rows.clone();
    csv[0][0] = "row".into();
    Rendered {
        json: serde_json::to_value(&j).expect("serializable"),
        csv,
        table: table(&rows),
    }
}

pub fn complex_matrix(name: &str, m: &PrecComplexMatrix, shown_digits: u32) -> Rendered {
    let full = ComplexMatrixJson::new(name, m);
    let short = m.to_records(shown_digits);
    let mut header = vec!["row".to_string()];
    for c in &full.col_labels {
        header.push(format!("{c}.re"));
        header.push(format!("{c}.im"));
    }
    let mut csv = vec![header];
    for (label, r) in full.row_labels.iter().zip(&full.entries) {
        let mut row = vec![label.clone()];
        for z in r {
            row.push(z.re.clone());
            row.push(z.im.clone());
        }
        csv.push(row);
    }
    let mut rows = vec![std::iter::once(String::new()).chain(full.col_labels.iter().cloned()).collect::<Vec<_>>()];
    for (label, r) in full.row_labels.iter().zip(&short) {
        let mut row = vec![label.clone()];
        row.extend(r.iter().map(|z| format!("{} {} {}i", z.re, if z.im.starts_with('-') { "-" } else { "+" }, z.im.trim_start_matches('-'))));
        rows.push(row);
    }
    Rendered {
        json: serde_json::to_value(&full).expect("serializable"),
        csv,
        table: table(&rows),
    }
}
