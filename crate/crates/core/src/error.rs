use thiserror::Error;

use crate::kernels::NormKind;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("basis is square ({n}x{n}); its orthogonal complement is empty")]
    EmptyComplement { n: usize },

    #[error("no Hadamard construction available for order {0}")]
    UnsupportedOrder(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },

    #[error("columns are not orthonormal: |X^T X - I|_F = {residual:e} exceeds {tolerance:e}")]
    InvalidBasis { residual: f64, tolerance: f64 },

    #[error("shape error: {0}")]
    ShapeError(String),

    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },

    #[error("not applicable: {0}")]
    NotApplicable(&'static str),

    #[error("X^T D is not symmetric positive semidefinite: {0}")]
    NotAligned(String),

    #[error("closed-form check failed for {norm} norm at delta = {delta:e}: expected {expected:e}, computed {computed:e}")]
    VerificationFailure {
        norm: NormKind,
        delta: f64,
        expected: f64,
        computed: f64,
    },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn shape_str(rows: usize, cols: usize) -> String {
    format!("{rows}x{cols}")
}
