//! Matrix files.
//!
//! ```json
//! { "dim": 2, "matrix": [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]] }
//! ```
//!
//! `matrix` is row-major; each entry is a `[re, im]` pair. Floats are
//! written with shortest round-trip formatting, so a write/read cycle is
//! exact. A projector file holds `{ "projectors": [<matrix file>, …] }`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::linop::{CMatrix, C64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectorFile {
    pub projectors: Vec<MatrixFile>,
}

impl MatrixFile {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let matrix = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect();
        Self { dim: m.nrows(), matrix }
    }

    /// Checks the declared shape and converts.
    pub fn to_matrix(&self) -> Result<CMatrix, String> {
        if self.dim == 0 {
            return Err("dim must be positive".into());
        }
        if self.matrix.len() != self.dim {
            return Err(format!("expected {} rows, found {}", self.dim, self.matrix.len()));
        }
        if let Some((i, row)) = self.matrix.iter().enumerate().find(|(_, r)| r.len() != self.dim) {
            return Err(format!("row {i} has {} entries, expected {}", row.len(), self.dim));
        }
        Ok(CMatrix::from_fn(self.dim, self.dim, |i, j| {
            let [re, im] = self.matrix[i][j];
            C64::new(re, im)
        }))
    }
}

pub fn read_matrix(path: &Path) -> Result<CMatrix, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let file: MatrixFile = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    file.to_matrix().map_err(|e| format!("{}: {e}", path.display()))
}

pub fn write_matrix(path: &Path, m: &CMatrix) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(&MatrixFile::from_matrix(m)).expect("matrix serializes");
    fs::write(path, text + "\n")
}

pub fn read_projectors(path: &Path) -> Result<Vec<CMatrix>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let file: ProjectorFile = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    file.projectors
        .iter()
        .enumerate()
        .map(|(k, p)| p.to_matrix().map_err(|e| format!("{}: projector {k}: {e}", path.display())))
        .collect()
}

pub fn write_projectors(path: &Path, projectors: &[CMatrix]) -> std::io::Result<()> {
    let file = ProjectorFile { projectors: projectors.iter().map(MatrixFile::from_matrix).collect() };
    fs::write(path, serde_json::to_string_pretty(&file).expect("projectors serialize") + "\n")
}
