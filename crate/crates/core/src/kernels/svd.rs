use faer::{Mat, MatRef};

use super::{check_finite, DenseMatrix, UNIT_ROUNDOFF};
use crate::error::{Error, Result};

/// How the numerical rank of a matrix is decided from its singular values.
///
/// The rank is the number of singular values strictly greater than the
/// resulting tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum RankPolicy {
    /// Fixed threshold.
    Absolute(f64),
    /// Threshold `eps * sigma_1`.
    Relative(f64),
    /// `max(m, n) * sigma_1 * u` with `u` the unit roundoff.
    #[default]
    Default,
}

impl RankPolicy {
    pub fn tolerance(self, rows: usize, cols: usize, sigma_max: f64) -> f64 {
        match self {
            RankPolicy::Absolute(tol) => tol,
            RankPolicy::Relative(eps) => eps * sigma_max,
            RankPolicy::Default => rows.max(cols) as f64 * sigma_max * UNIT_ROUNDOFF,
        }
    }

    pub fn rank_of(self, rows: usize, cols: usize, sigma: &[f64]) -> (usize, f64) {
        let tol = self.tolerance(rows, cols, sigma.first().copied().unwrap_or(0.0));
        (sigma.iter().take_while(|&&s| s > tol).count(), tol)
    }
}

/// Full SVD `B = U diag(sigma) V^T` with square orthogonal `U` and `V`.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    /// m x m orthogonal.
    pub u: DenseMatrix,
    /// Nonincreasing, length min(m, n).
    pub sigma: Vec<f64>,
    /// n x n orthogonal.
    pub v: DenseMatrix,
    pub numerical_rank: usize,
    pub rank_tolerance: f64,
}

impl SvdFactors {
    pub fn rows(&self) -> usize {
        self.u.nrows()
    }

    pub fn cols(&self) -> usize {
        self.v.nrows()
    }

    /// Smallest singular value above the rank tolerance.
    pub fn sigma_r(&self) -> Option<f64> {
        self.numerical_rank.checked_sub(1).map(|i| self.sigma[i])
    }

    /// Leading `numerical_rank` left singular vectors.
    pub fn u1(&self) -> DenseMatrix {
        self.u.columns(0, self.numerical_rank).into_owned()
    }

    /// Left singular vectors beyond the numerical rank.
    pub fn u2(&self) -> DenseMatrix {
        let r = self.numerical_rank;
        self.u.columns(r, self.u.ncols() - r).into_owned()
    }

    pub fn v1(&self) -> DenseMatrix {
        self.v.columns(0, self.numerical_rank).into_owned()
    }

    pub fn v2(&self) -> DenseMatrix {
        let r = self.numerical_rank;
        self.v.columns(r, self.v.ncols() - r).into_owned()
    }

    /// `U diag(sigma) V^T`, padded to the original shape.
    pub fn reconstruct(&self) -> DenseMatrix {
        let (m, n) = (self.rows(), self.cols());
        let mut s = DenseMatrix::zeros(m, n);
        for (i, &x) in self.sigma.iter().enumerate() {
            s[(i, i)] = x;
        }
        &self.u * s * self.v.transpose()
    }
}

fn to_faer(b: &DenseMatrix) -> Mat<f64> {
    Mat::from_fn(b.nrows(), b.ncols(), |i, j| b[(i, j)])
}

fn from_faer(m: MatRef<'_, f64>) -> DenseMatrix {
    DenseMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Singular values in nonincreasing order. Empty matrices have none.
pub fn singular_values(b: &DenseMatrix) -> Vec<f64> {
    if b.nrows() == 0 || b.ncols() == 0 {
        return Vec::new();
    }
    to_faer(b)
        .singular_values()
        .unwrap_or_else(|_| vec![f64::NAN; b.nrows().min(b.ncols())])
}

/// Full singular value decomposition with a numerical rank decision.
pub fn svd(b: &DenseMatrix, policy: RankPolicy) -> Result<SvdFactors> {
    let (m, n) = b.shape();
    if m == 0 || n == 0 {
        return Err(Error::InvalidInput("matrix must have at least one row and column".into()));
    }
    check_finite(b)?;

    let f = to_faer(b)
        .svd()
        .map_err(|e| Error::NumericalFailure(format!("SVD of {m}x{n} matrix did not converge: {e:?}")))?;
    let sigma: Vec<f64> = f.S().column_vector().iter().copied().collect();
    let u = from_faer(f.U());
    let v = from_faer(f.V());
    let (numerical_rank, rank_tolerance) = policy.rank_of(m, n, &sigma);

    Ok(SvdFactors {
        u,
        sigma,
        v,
        numerical_rank,
        rank_tolerance,
    })
}
