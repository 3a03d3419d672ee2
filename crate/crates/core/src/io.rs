//! JSON file formats.
//!
//! - matrix: `{"rows": int, "cols": int, "data": [[re, im], ...]}`, row-major;
//! - bipartite vector: `{"dim_a": int, "dim_b": int, "coeff": <matrix>}`;
//! - antilinear map: see [`crate::antilinear::AntilinearMapFile`];
//! - channel spec: `{"psi_ab": <bipartite>, "phi_bc": <bipartite>}`;
//! - chain spec: `{"stages": [<bipartite>; 4]}`.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bipartite::BipartiteVector;
use crate::matcore::{c64, ComplexMatrix};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid content: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl From<&ComplexMatrix> for MatrixFile {
    fn from(m: &ComplexMatrix) -> Self {
        let mut data = Vec::with_capacity(m.len());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                let z = m[(r, c)];
                data.push([z.re, z.im]);
            }
        }
        Self { rows: m.nrows(), cols: m.ncols(), data }
    }
}

impl TryFrom<MatrixFile> for ComplexMatrix {
    type Error = FormatError;

    fn try_from(f: MatrixFile) -> Result<Self, FormatError> {
        if f.rows == 0 || f.cols == 0 {
            return Err(FormatError::Invalid(format!(
                "matrix dimensions must be positive, got {}x{}",
                f.rows, f.cols
            )));
        }
        if f.data.len() != f.rows * f.cols {
            return Err(FormatError::Invalid(format!(
                "{}x{} matrix needs {} entries, found {}",
                f.rows,
                f.cols,
                f.rows * f.cols,
                f.data.len()
            )));
        }
        if let Some(i) = f.data.iter().position(|[re, im]| !(re.is_finite() && im.is_finite())) {
            return Err(FormatError::Invalid(format!("entry {i} is not finite")));
        }
        Ok(ComplexMatrix::from_row_iterator(
            f.rows,
            f.cols,
            f.data.iter().map(|&[re, im]| c64(re, im)),
        ))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BipartiteFile {
    pub dim_a: usize,
    pub dim_b: usize,
    pub coeff: MatrixFile,
}

impl From<&BipartiteVector> for BipartiteFile {
    fn from(v: &BipartiteVector) -> Self {
        Self { dim_a: v.dim_a(), dim_b: v.dim_b(), coeff: MatrixFile::from(v.coeff()) }
    }
}

impl TryFrom<BipartiteFile> for BipartiteVector {
    type Error = FormatError;

    fn try_from(f: BipartiteFile) -> Result<Self, FormatError> {
        let coeff = ComplexMatrix::try_from(f.coeff)?;
        if coeff.nrows() != f.dim_a || coeff.ncols() != f.dim_b {
            return Err(FormatError::Invalid(format!(
                "declared dims {}x{} but coefficient matrix is {}x{}",
                f.dim_a,
                f.dim_b,
                coeff.nrows(),
                coeff.ncols()
            )));
        }
        BipartiteVector::new(coeff).map_err(|e| FormatError::Invalid(e.to_string()))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub psi_ab: BipartiteFile,
    pub phi_bc: BipartiteFile,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainFile {
    pub stages: Vec<BipartiteFile>,
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, FormatError> {
    let text = std::fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(serde_json::from_str(&text)?)
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix, FormatError> {
    ComplexMatrix::try_from(read_json::<MatrixFile>(path)?)
}

pub fn read_bipartite(path: &Path) -> Result<BipartiteVector, FormatError> {
    BipartiteVector::try_from(read_json::<BipartiteFile>(path)?)
}

pub fn parse_bipartite(text: &str) -> Result<BipartiteVector, FormatError> {
    BipartiteVector::try_from(serde_json::from_str::<BipartiteFile>(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_format_field_names() {
        let m = ComplexMatrix::from_row_slice(1, 2, &[c64(1.0, -2.0), c64(0.5, 0.0)]);
        let text = serde_json::to_string(&MatrixFile::from(&m)).unwrap();
        assert_eq!(text, r#"{"rows":1,"cols":2,"data":[[1.0,-2.0],[0.5,0.0]]}"#);
        let back: MatrixFile = serde_json::from_str(&text).unwrap();
        assert_eq!(ComplexMatrix::try_from(back).unwrap(), m);
    }

    #[test]
    fn matrix_format_rejects_bad_input() {
        let short: MatrixFile = serde_json::from_str(r#"{"rows":2,"cols":2,"data":[[1,0]]}"#).unwrap();
        assert!(ComplexMatrix::try_from(short).is_err());
        assert!(serde_json::from_str::<MatrixFile>(r#"{"rows":1,"columns":1,"data":[[1,0]]}"#).is_err());
        let empty: MatrixFile = serde_json::from_str(r#"{"rows":0,"cols":0,"data":[]}"#).unwrap();
        assert!(ComplexMatrix::try_from(empty).is_err());
    }

    #[test]
    fn bipartite_format() {
        let text = r#"{"dim_a":2,"dim_b":1,"coeff":{"rows":2,"cols":1,"data":[[0.6,0],[0,0.8]]}}"#;
        let v = parse_bipartite(text).unwrap();
        assert_eq!(v.dim_a(), 2);
        assert_eq!(v.dim_b(), 1);
        let mismatched = r#"{"dim_a":1,"dim_b":2,"coeff":{"rows":2,"cols":1,"data":[[0.6,0],[0,0.8]]}}"#;
        assert!(parse_bipartite(mismatched).is_err());
    }
}
