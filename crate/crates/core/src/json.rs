//! JSON shapes shared by the library and the command line.
//!
//! Exact matrices carry `"p/q"` strings; numeric matrices carry
//! `{"re", "im", "digits"}` records.

use serde::Serialize;
use serde_json::{json, Value};

use crate::chain::format_rational;
use crate::matrix::{IntMatrix, RationalMatrix};
use crate::numerics::{ComplexRecord, PrecComplexMatrix};

#[derive(Debug, Clone, Serialize)]
pub struct ExactMatrixJson {
    pub name: String,
    pub labels: Vec<String>,
    pub entries: Vec<Vec<String>>,
}

impl ExactMatrixJson {
    pub fn new(name: &str, m: &RationalMatrix) -> Self {
        ExactMatrixJson {
            name: name.to_string(),
            labels: m.labels().to_vec(),
            entries: m.to_string_rows(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ComplexMatrixJson {
    pub name: String,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub digits: u32,
    pub entries: Vec<Vec<ComplexRecord>>,
}

impl ComplexMatrixJson {
    pub fn new(name: &str, m: &PrecComplexMatrix) -> Self {
        ComplexMatrixJson {
            name: name.to_string(),
            row_labels: m.row_labels().to_vec(),
            col_labels: m.col_labels().to_vec(),
            digits: m.digits(),
            entries: m.to_records(m.digits()),
        }
    }
}

pub fn int_matrix_value(m: &IntMatrix) -> Value {
    Value::Array(
        m.to_rows()
            .into_iter()
            .map(|r| Value::Array(r.into_iter().map(|x| json!(x.to_string())).collect()))
            .collect(),
    )
}

pub fn rational_list(values: &[crate::chain::Rational]) -> Vec<String> {
    values.iter().map(format_rational).collect()
}
