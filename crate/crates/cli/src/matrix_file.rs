//! JSON matrix files: `{"rows": r, "cols": c, "data": [[[re, im], ...], ...]}`.

use std::path::Path;

use num_complex::Complex64;
use radii_core::linalg::ComplexMatrix;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<[f64; 2]>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let data = (0..m.rows())
            .map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect())
            .collect();
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data,
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix, CliError> {
        if self.rows == 0 || self.cols == 0 {
            return Err(CliError::usage("rows/cols: matrix must have at least one entry"));
        }
        if self.data.len() != self.rows {
            return Err(CliError::usage(format!(
                "data: expected {} rows, found {}",
                self.rows,
                self.data.len()
            )));
        }
        let mut entries = Vec::with_capacity(self.rows * self.cols);
        for (i, row) in self.data.iter().enumerate() {
            if row.len() != self.cols {
                return Err(CliError::usage(format!(
                    "data[{i}]: expected {} entries, found {}",
                    self.cols,
                    row.len()
                )));
            }
            for (j, &[re, im]) in row.iter().enumerate() {
                if !(re.is_finite() && im.is_finite()) {
                    return Err(CliError::usage(format!("data[{i}][{j}]: entry is not finite")));
                }
                entries.push(Complex64::new(re, im));
            }
        }
        ComplexMatrix::new(self.rows, self.cols, entries).map_err(|e| CliError::usage(format!("data: {e}")))
    }

    /// Serialized with the shortest decimal that reads back to the same
    /// `f64`, so a write/read cycle is bit-exact.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("matrix file serializes")
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::usage(format!("matrix file: {e}")))
    }
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("input: cannot read {}: {e}", path.display())))?;
    MatrixFile::parse(&text)?.to_matrix()
}
