//! Dense-matrix primitives: SVD with an explicit rank decision, unitarily
//! invariant norms of singular-value lists, orthonormal completion, Hadamard
//! matrices and the plain-text matrix format.

mod basis;
mod hadamard;
mod io;
mod svd;

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use basis::{orthonormal_completion, OrthonormalBasis};
pub use hadamard::{hadamard, hadamard_signs};
pub use io::{read_matrix, read_matrix_file, write_matrix, write_matrix_file};
pub use svd::{singular_values, svd, RankPolicy, SvdFactors};

/// Real dense matrix used throughout the crate.
pub type DenseMatrix = DMatrix<f64>;

/// Unit roundoff of `f64`, 2^-53.
pub const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

/// The unitarily invariant norms supported by the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    Spectral,
    Frobenius,
    Trace,
}

impl NormKind {
    pub const ALL: [NormKind; 3] = [NormKind::Spectral, NormKind::Frobenius, NormKind::Trace];

    pub fn as_str(self) -> &'static str {
        match self {
            NormKind::Spectral => "spectral",
            NormKind::Frobenius => "frobenius",
            NormKind::Trace => "trace",
        }
    }

    /// Norm of `diag(values)`. Values are taken as magnitudes.
    pub fn of_values(self, values: &[f64]) -> f64 {
        match self {
            NormKind::Spectral => values.iter().fold(0.0_f64, |m, v| m.max(v.abs())),
            NormKind::Frobenius => values.iter().map(|v| v * v).sum::<f64>().sqrt(),
            NormKind::Trace => values.iter().map(|v| v.abs()).sum(),
        }
    }

    /// Norm of a matrix through its singular values.
    pub fn of_matrix(self, m: &DenseMatrix) -> f64 {
        match self {
            // Exact and cheaper than an SVD.
            NormKind::Frobenius => m.norm(),
            _ => self.of_values(&singular_values(m)),
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "spectral" | "2" => Ok(NormKind::Spectral),
            "frobenius" | "f" | "fro" => Ok(NormKind::Frobenius),
            "trace" | "tr" | "nuclear" => Ok(NormKind::Trace),
            other => Err(Error::InvalidInput(format!("unknown norm kind '{other}'"))),
        }
    }
}

/// The three supported norms of one matrix, from a single set of singular
/// values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormValues {
    pub spectral: f64,
    pub frobenius: f64,
    pub trace: f64,
}

impl NormValues {
    pub fn from_singular_values(sv: &[f64]) -> Self {
        Self {
            spectral: NormKind::Spectral.of_values(sv),
            frobenius: NormKind::Frobenius.of_values(sv),
            trace: NormKind::Trace.of_values(sv),
        }
    }

    pub fn of_matrix(m: &DenseMatrix) -> Self {
        Self::from_singular_values(&singular_values(m))
    }

    pub fn get(&self, kind: NormKind) -> f64 {
        match kind {
            NormKind::Spectral => self.spectral,
            NormKind::Frobenius => self.frobenius,
            NormKind::Trace => self.trace,
        }
    }
}

/// Norm of the best rank-`r` approximation of `b`: the norm of its `r`
/// largest singular values.
pub fn truncated_norm(b: &DenseMatrix, r: usize, kind: NormKind) -> Result<f64> {
    if r == 0 {
        return Err(Error::InvalidInput("truncation rank must be at least 1".into()));
    }
    check_finite(b)?;
    let sv = singular_values(b);
    Ok(kind.of_values(&sv[..r.min(sv.len())]))
}

/// Spectral norm, ‖B‖₂.
pub fn spectral_norm(b: &DenseMatrix) -> f64 {
    NormKind::Spectral.of_matrix(b)
}

pub(crate) fn check_finite(b: &DenseMatrix) -> Result<()> {
    if let Some(pos) = b.iter().position(|v| !v.is_finite()) {
        let (r, c) = (pos % b.nrows(), pos / b.nrows());
        return Err(Error::InvalidInput(format!("non-finite entry at ({r}, {c})")));
    }
    Ok(())
}
