//! State and ensemble file formats (JSON).
//!
//! A state file carries an n×n complex matrix with every entry encoded as
//! a strict `[re, im]` pair of numbers, plus optional metadata:
//!
//! ```json
//! {
//!   "dim": 2,
//!   "label": "example",
//!   "comment": "optional free text",
//!   "matrix": [
//!     [[0.5, 0.0], [0.25, 0.0]],
//!     [[0.25, 0.0], [0.5, 0.0]]
//!   ]
//! }
//! ```
//!
//! Validation failures are reported, never silently fixed.

use cohassist::qmat::ComplexMatrix;
use cohassist::states::{DensityMatrix, PureEnsemble, PureState, StateError};
use num_complex::Complex64;
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dim: usize,
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub comment: Option<String>,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleFile {
    pub dim: usize,
    /// Accepted for symmetry with state files; not otherwise used.
    #[serde(default)]
    #[allow(dead_code)]
    pub label: Option<String>,
    pub members: Vec<EnsembleMemberFile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleMemberFile {
    pub weight: f64,
    pub amplitudes: Vec<[f64; 2]>,
}

#[derive(Debug, thiserror::Error)]
pub enum FileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("parse error in {path}: {source}")]
    Parse {
        path: String,
        source: serde_json::Error,
    },

    #[error("{path}: declared dim {dim} does not match a {rows}x{cols} matrix")]
    DimMismatch {
        path: String,
        dim: usize,
        rows: usize,
        cols: usize,
    },

    #[error("{path}: {source}")]
    Invalid {
        path: String,
        source: StateError,
    },
}

pub struct LoadedState {
    pub state: DensityMatrix,
    pub label: Option<String>,
    pub comment: Option<String>,
    pub sha256: String,
}

pub fn load_state(path: &str, tol: f64) -> Result<LoadedState, FileError> {
    let bytes = std::fs::read(path).map_err(|source| FileError::Io {
        path: path.to_string(),
        source,
    })?;
    let sha256 = sha256_hex(&bytes);
    let parsed: StateFile = serde_json::from_slice(&bytes).map_err(|source| FileError::Parse {
        path: path.to_string(),
        source,
    })?;

    let rows = parsed.matrix.len();
    let cols = parsed.matrix.first().map_or(0, |r| r.len());
    if parsed.dim == 0
        || rows != parsed.dim
        || parsed.matrix.iter().any(|r| r.len() != parsed.dim)
    {
        return Err(FileError::DimMismatch {
            path: path.to_string(),
            dim: parsed.dim,
            rows,
            cols,
        });
    }

    let complex_rows: Vec<Vec<Complex64>> = parsed
        .matrix
        .iter()
        .map(|row| row.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
        .collect();
    let raw = ComplexMatrix::from_rows(&complex_rows);
    let state = DensityMatrix::new(raw, tol).map_err(|source| FileError::Invalid {
        path: path.to_string(),
        source,
    })?;
    Ok(LoadedState {
        state,
        label: parsed.label,
        comment: parsed.comment,
        sha256,
    })
}

pub fn load_ensemble(path: &str, tol: f64) -> Result<PureEnsemble, FileError> {
    let bytes = std::fs::read(path).map_err(|source| FileError::Io {
        path: path.to_string(),
        source,
    })?;
    let parsed: EnsembleFile =
        serde_json::from_slice(&bytes).map_err(|source| FileError::Parse {
            path: path.to_string(),
            source,
        })?;
    let mut members = Vec::with_capacity(parsed.members.len());
    for m in &parsed.members {
        if m.amplitudes.len() != parsed.dim {
            return Err(FileError::DimMismatch {
                path: path.to_string(),
                dim: parsed.dim,
                rows: m.amplitudes.len(),
                cols: 1,
            });
        }
        let amps: Vec<Complex64> = m
            .amplitudes
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        let state = PureState::new(amps, tol).map_err(|source| FileError::Invalid {
            path: path.to_string(),
            source,
        })?;
        members.push((m.weight, state));
    }
    PureEnsemble::new(members, tol).map_err(|source| FileError::Invalid {
        path: path.to_string(),
        source,
    })
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}
