//! CSV and JSON result tables.
//!
//! Floating-point fields are rounded to 12 significant digits before
//! serialization, so a parsed table compares equal to the rounded original.

use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spinmodel::SweepRow;

pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("refusing to emit an empty table")]
    Empty,
    #[error("row {row}: field {field} is not finite ({value})")]
    NonFinite {
        row: usize,
        field: &'static str,
        value: f64,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!(
                "unknown output format {other:?} (expected csv or json)"
            )),
        }
    }
}

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_significant(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .unwrap()
}

/// A row type that can be written to a result table.
pub trait TableRow: Serialize + DeserializeOwned {
    /// Floating-point fields by column name.
    fn numeric_fields(&self) -> Vec<(&'static str, f64)>;
    /// Copy with every floating-point field rounded.
    fn rounded(&self) -> Self;
}

/// One scan point: energies in hartree, entropies in bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub r_angstrom: f64,
    pub e_rhf: f64,
    pub e_uhf: f64,
    pub e_fci: f64,
    pub e_c: f64,
    pub s_spatial: f64,
    pub s_spinmode: f64,
    pub reference: String,
}

impl TableRow for ResultRow {
    fn numeric_fields(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("r_angstrom", self.r_angstrom),
            ("e_rhf", self.e_rhf),
            ("e_uhf", self.e_uhf),
            ("e_fci", self.e_fci),
            ("e_c", self.e_c),
            ("s_spatial", self.s_spatial),
            ("s_spinmode", self.s_spinmode),
        ]
    }

    fn rounded(&self) -> Self {
        ResultRow {
            r_angstrom: round_significant(self.r_angstrom),
            e_rhf: round_significant(self.e_rhf),
            e_uhf: round_significant(self.e_uhf),
            e_fci: round_significant(self.e_fci),
            e_c: round_significant(self.e_c),
            s_spatial: round_significant(self.s_spatial),
            s_spinmode: round_significant(self.s_spinmode),
            reference: self.reference.clone(),
        }
    }
}

impl TableRow for SweepRow {
    fn numeric_fields(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("r_bohr", self.r_bohr),
            ("b", self.b),
            ("j", self.j),
            ("s", self.s),
        ]
    }

    fn rounded(&self) -> Self {
        SweepRow {
            r_bohr: round_significant(self.r_bohr),
            b: round_significant(self.b),
            j: round_significant(self.j),
            s: round_significant(self.s),
            within_validity: self.within_validity,
        }
    }
}

/// Serializes `rows`, refusing empty tables and non-finite values.
pub fn emit_results<T: TableRow>(rows: &[T], format: OutputFormat) -> Result<String, TableError> {
    if rows.is_empty() {
        return Err(TableError::Empty);
    }
    for (row, r) in rows.iter().enumerate() {
        if let Some((field, value)) = r.numeric_fields().into_iter().find(|(_, v)| !v.is_finite()) {
            return Err(TableError::NonFinite { row, field, value });
        }
    }
    let rounded: Vec<T> = rows.iter().map(TableRow::rounded).collect();
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &rounded {
                w.serialize(r)?;
            }
            let bytes = w
                .into_inner()
                .map_err(|e| csv::Error::from(e.into_error()))?;
            Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
        }
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&rounded)?;
            s.push('\n');
            Ok(s)
        }
    }
}

pub fn parse_results<T: TableRow>(text: &str, format: OutputFormat) -> Result<Vec<T>, TableError> {
    match format {
        OutputFormat::Csv => {
            let mut r = csv::Reader::from_reader(text.as_bytes());
            Ok(r.deserialize().collect::<Result<Vec<T>, _>>()?)
        }
        OutputFormat::Json => Ok(serde_json::from_str(text)?),
    }
}
