use nalgebra::linalg::QR;
use nalgebra::DMatrix;

use super::{check_finite, DenseMatrix};
use crate::error::{shape_str, Error, Result};

/// n x k matrix whose columns are orthonormal to a stated tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalBasis {
    matrix: DenseMatrix,
    ortho_tolerance: f64,
}

impl OrthonormalBasis {
    /// Default tolerance on ‖X^T X − I‖_F for an n-row basis.
    pub fn default_tolerance(n: usize) -> f64 {
        1e-12 * n as f64
    }

    pub fn new(matrix: DenseMatrix) -> Result<Self> {
        let tol = Self::default_tolerance(matrix.nrows());
        Self::with_tolerance(matrix, tol)
    }

    pub fn with_tolerance(matrix: DenseMatrix, ortho_tolerance: f64) -> Result<Self> {
        let (n, k) = matrix.shape();
        if n == 0 || k == 0 || k > n {
            return Err(Error::ShapeError(format!(
                "an orthonormal basis needs 1 <= k <= n, got {}",
                shape_str(n, k)
            )));
        }
        check_finite(&matrix)?;
        let residual = gram_residual(&matrix);
        if !(residual <= ortho_tolerance) {
            return Err(Error::InvalidBasis {
                residual,
                tolerance: ortho_tolerance,
            });
        }
        Ok(Self {
            matrix,
            ortho_tolerance,
        })
    }

    /// Orthonormal basis of the column span of a full column rank matrix,
    /// via thin Householder QR with the diagonal of R made nonnegative.
    pub fn from_span(matrix: &DenseMatrix) -> Result<Self> {
        let (n, k) = matrix.shape();
        if n == 0 || k == 0 || k > n {
            return Err(Error::ShapeError(format!("cannot orthonormalize {}", shape_str(n, k))));
        }
        check_finite(matrix)?;
        let qr = QR::new(matrix.clone());
        let mut q = qr.q();
        let r = qr.r();
        for j in 0..k {
            if r[(j, j)] < 0.0 {
                q.column_mut(j).neg_mut();
            }
        }
        Self::new(q)
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.matrix
    }

    pub fn ortho_tolerance(&self) -> f64 {
        self.ortho_tolerance
    }

    /// Ambient dimension.
    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    /// Subspace dimension.
    pub fn k(&self) -> usize {
        self.matrix.ncols()
    }

    /// Same subspace, basis `X Q`.
    pub fn rotate(&self, q: &DenseMatrix) -> Result<Self> {
        if q.shape() != (self.k(), self.k()) {
            return Err(Error::DimensionMismatch {
                expected: shape_str(self.k(), self.k()),
                got: shape_str(q.nrows(), q.ncols()),
            });
        }
        Self::with_tolerance(&self.matrix * q, self.ortho_tolerance.max(Self::default_tolerance(self.n())))
    }
}

impl AsRef<DenseMatrix> for OrthonormalBasis {
    fn as_ref(&self) -> &DenseMatrix {
        &self.matrix
    }
}

pub(crate) fn gram_residual(x: &DenseMatrix) -> f64 {
    let k = x.ncols();
    (x.transpose() * x - DenseMatrix::identity(k, k)).norm()
}

/// Columns completing the orthonormal `x` to a square orthogonal matrix.
/// Returns an n x 0 matrix when `x` is square.
pub(crate) fn complement_columns(x: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, k) = x.shape();
    if k >= n {
        return DMatrix::zeros(n, 0);
    }
    let qr = QR::new(x.clone());
    // Q^T I, then transpose: the full Householder Q.
    let mut q_t = DMatrix::identity(n, n);
    qr.q_tr_mul(&mut q_t);
    q_t.rows(k, n - k).transpose()
}

/// X_⊥ with `[X, X_⊥]` orthogonal.
pub fn orthonormal_completion(x: &OrthonormalBasis) -> Result<DenseMatrix> {
    if x.k() == x.n() {
        return Err(Error::EmptyComplement { n: x.n() });
    }
    Ok(complement_columns(x.matrix()))
}
