//! Polar decompositions and D-alignment of orthonormal bases.
//!
//! A basis `X` of a subspace is D-aligned when `XᵀD` is symmetric positive
//! semidefinite. With `r = rank(XᵀD)` and the SVD `X_◇ᵀD = U Σ Vᵀ` of any
//! basis `X_◇` of the same subspace, the aligned bases are exactly
//!
//! ```text
//! X_◇ U₁V₁ᵀ + X_◇ U₂ W V₂ᵀ,   W ∈ O^{(k−r)×(k−r)}
//! ```
//!
//! where the first term depends only on the subspace. [`AlignedBasisSet`]
//! stores that decomposition.

use nalgebra::linalg::SymmetricEigen;
use serde::Serialize;

use crate::error::{shape_str, Error, Result};
use crate::kernels::{
    spectral_norm, svd, DenseMatrix, NormKind, OrthonormalBasis, RankPolicy, SvdFactors,
};
use crate::sampling::{haar_orthogonal, rng_for};

/// Tolerance on ‖WᵀW − I‖_F for the freedom matrix of a set member.
const W_ORTHO_TOL: f64 = 1e-10;

/// Relative tolerance (times ‖D‖₂) for the symmetric PSD test of `XᵀD`.
pub const PSD_TOL: f64 = 1e-10;

/// Default number of Haar samples for set-distance estimates.
pub const DEFAULT_W_SAMPLES: usize = 512;

/// `B = Q H` with `Q = U₁V₁ᵀ` the unique partial isometry and `H = (BᵀB)^{1/2}`.
#[derive(Debug, Clone)]
pub struct CanonicalPolar {
    pub q: DenseMatrix,
    pub h: DenseMatrix,
    pub r: usize,
}

/// Canonical polar decomposition of a tall or square matrix, with rank decided
/// by the default policy.
pub fn polar(b: &DenseMatrix) -> Result<CanonicalPolar> {
    polar_with(b, RankPolicy::Default)
}

pub fn polar_with(b: &DenseMatrix, policy: RankPolicy) -> Result<CanonicalPolar> {
    let (n, m) = b.shape();
    if n < m {
        return Err(Error::ShapeError(format!(
            "polar decomposition needs rows >= cols, got {}; transpose first",
            shape_str(n, m)
        )));
    }
    let f = svd(b, policy)?;
    let q = f.u1() * f.v1().transpose();
    let sigma = DenseMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&f.sigma));
    let h = &f.v * sigma * f.v.transpose();
    Ok(CanonicalPolar {
        q,
        h,
        r: f.numerical_rank,
    })
}

/// An orthogonal polar factor `U(:, 1:m) Vᵀ` of a tall or square matrix.
/// Unique when `b` has full column rank; otherwise one valid choice.
pub fn orthogonal_polar_factor(b: &DenseMatrix) -> Result<DenseMatrix> {
    let (n, m) = b.shape();
    if n < m {
        return Err(Error::ShapeError(format!(
            "polar factor needs rows >= cols, got {}",
            shape_str(n, m)
        )));
    }
    let f = svd(b, RankPolicy::Default)?;
    Ok(f.u.columns(0, m) * f.v.transpose())
}

/// All D-aligned orthonormal bases of one subspace:
/// `base + freedom_left · W · freedom_rightᵀ` for orthogonal `W`.
#[derive(Debug, Clone)]
pub struct AlignedBasisSet {
    /// `X V₁V₁ᵀ`, n x k; depends on the subspace only.
    pub base: DenseMatrix,
    /// `X V₂`, n x (k − r).
    pub freedom_left: DenseMatrix,
    /// `V₂`, k x (k − r).
    pub freedom_right: DenseMatrix,
    /// rank(XᵀD).
    pub r: usize,
    /// Smallest positive singular value of XᵀD; `None` when r = 0.
    pub sigma_r: Option<f64>,
    pub d_spectral_norm: f64,
    pub rank_tolerance: f64,
}

impl AlignedBasisSet {
    pub fn n(&self) -> usize {
        self.base.nrows()
    }

    pub fn k(&self) -> usize {
        self.base.ncols()
    }

    /// Size of the orthogonal freedom, k − r.
    pub fn freedom_dim(&self) -> usize {
        self.freedom_left.ncols()
    }

    /// True when r = k and the aligned basis is unique.
    pub fn is_singleton(&self) -> bool {
        self.freedom_dim() == 0
    }

    /// The member for the orthogonal (k−r) x (k−r) matrix `w`. For r = k pass
    /// a 0 x 0 matrix.
    pub fn member(&self, w: &DenseMatrix) -> Result<OrthonormalBasis> {
        let fd = self.freedom_dim();
        if w.shape() != (fd, fd) {
            return Err(Error::DimensionMismatch {
                expected: shape_str(fd, fd),
                got: shape_str(w.nrows(), w.ncols()),
            });
        }
        let defect = (w.transpose() * w - DenseMatrix::identity(fd, fd)).norm();
        if !(defect <= W_ORTHO_TOL) {
            return Err(Error::InvalidInput(format!(
                "freedom matrix is not orthogonal: |W^T W - I|_F = {defect:e}"
            )));
        }
        OrthonormalBasis::new(self.member_unchecked(w))
    }

    pub(crate) fn member_unchecked(&self, w: &DenseMatrix) -> DenseMatrix {
        if self.is_singleton() {
            self.base.clone()
        } else {
            &self.base + &self.freedom_left * w * self.freedom_right.transpose()
        }
    }

    /// Every member when the set is finite (k − r ≤ 1).
    pub fn finite_members(&self) -> Option<Vec<DenseMatrix>> {
        match self.freedom_dim() {
            0 => Some(vec![self.base.clone()]),
            1 => Some(
                [1.0, -1.0]
                    .iter()
                    .map(|&s| self.member_unchecked(&DenseMatrix::from_element(1, 1, s)))
                    .collect(),
            ),
            _ => None,
        }
    }
}

/// D-aligned basis of R(x_any) together with the set of all such bases.
pub fn align(x_any: &OrthonormalBasis, d: &DenseMatrix) -> Result<(OrthonormalBasis, AlignedBasisSet)> {
    align_with(x_any, d, RankPolicy::Default)
}

/// [`align`] with an explicit rank policy for `XᵀD`.
///
/// The returned basis is `x_any · U Vᵀ` from the full SVD of `x_anyᵀ D`,
/// i.e. the member with `W = I`.
pub fn align_with(
    x_any: &OrthonormalBasis,
    d: &DenseMatrix,
    policy: RankPolicy,
) -> Result<(OrthonormalBasis, AlignedBasisSet)> {
    if d.shape() != (x_any.n(), x_any.k()) {
        return Err(Error::DimensionMismatch {
            expected: shape_str(x_any.n(), x_any.k()),
            got: shape_str(d.nrows(), d.ncols()),
        });
    }
    let x = x_any.matrix();
    let f: SvdFactors = svd(&(x.transpose() * d), policy)?;
    let aligned = OrthonormalBasis::new(x * &f.u * f.v.transpose())?;

    let set = AlignedBasisSet {
        base: x * f.u1() * f.v1().transpose(),
        freedom_left: x * f.u2(),
        freedom_right: f.v2(),
        r: f.numerical_rank,
        sigma_r: f.sigma_r(),
        d_spectral_norm: spectral_norm(d),
        rank_tolerance: f.rank_tolerance,
    };
    Ok((aligned, set))
}

/// Frobenius-nearest member of `set` to `x_tilde`, and its freedom matrix.
///
/// `W_opt` is the orthogonal polar factor of `freedom_leftᵀ · X̃ · freedom_right`.
pub fn optimal_representative(
    set: &AlignedBasisSet,
    x_tilde: &OrthonormalBasis,
) -> Result<(OrthonormalBasis, DenseMatrix)> {
    if x_tilde.matrix().shape() != set.base.shape() {
        return Err(Error::DimensionMismatch {
            expected: shape_str(set.n(), set.k()),
            got: shape_str(x_tilde.n(), x_tilde.k()),
        });
    }
    let w = optimal_freedom(set, x_tilde.matrix())?;
    Ok((set.member(&w)?, w))
}

fn optimal_freedom(set: &AlignedBasisSet, target: &DenseMatrix) -> Result<DenseMatrix> {
    if set.is_singleton() {
        return Ok(DenseMatrix::zeros(0, 0));
    }
    crate::polar::orthogonal_polar_factor(
        &(set.freedom_left.transpose() * target * &set.freedom_right),
    )
}

/// How much to trust a [`HausdorffEstimate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateQuality {
    Exact,
    /// Inner minimum exact, outer maximum over samples: a lower bound.
    LowerBound,
    /// Inner minimum also sampled.
    Approximate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HausdorffEstimate {
    pub value: f64,
    pub quality: EstimateQuality,
}

/// Estimate of `max_{Ỹ ∈ set_b} min_{Y ∈ set_a} ‖Ỹ − Y‖`.
///
/// Finite sets (k − r ≤ 1) are enumerated exactly. Otherwise the outer
/// maximum runs over `W = I` plus `samples` Haar-random `W`; for the Frobenius
/// norm the inner minimum is exact, for the others it is the best of the
/// Frobenius-optimal member and `samples` random members.
pub fn hausdorff_distance_estimate(
    set_a: &AlignedBasisSet,
    set_b: &AlignedBasisSet,
    kind: NormKind,
    samples: usize,
    seed: u64,
) -> Result<HausdorffEstimate> {
    if set_a.base.shape() != set_b.base.shape() {
        return Err(Error::DimensionMismatch {
            expected: shape_str(set_a.n(), set_a.k()),
            got: shape_str(set_b.n(), set_b.k()),
        });
    }
    if set_a.r != set_b.r {
        return Err(Error::RankMismatch {
            left: set_a.r,
            right: set_b.r,
        });
    }

    let mut outer_rng = rng_for(seed, 0);
    let mut inner_rng = rng_for(seed, 1);
    let fd = set_b.freedom_dim();

    let (outer, outer_exact) = match set_b.finite_members() {
        Some(members) => (members, true),
        None => {
            let mut members = vec![set_b.member_unchecked(&DenseMatrix::identity(fd, fd))];
            members.extend(
                (0..samples).map(|_| set_b.member_unchecked(&haar_orthogonal(fd, &mut outer_rng))),
            );
            (members, false)
        }
    };

    let mut inner_exact = true;
    let mut value = 0.0_f64;
    for y_tilde in &outer {
        let (dist, exact) = match set_a.finite_members() {
            Some(members) => (
                members
                    .iter()
                    .map(|y| kind.of_matrix(&(y_tilde - y)))
                    .fold(f64::INFINITY, f64::min),
                true,
            ),
            None => {
                let w_opt = optimal_freedom(set_a, y_tilde)?;
                let best = kind.of_matrix(&(y_tilde - set_a.member_unchecked(&w_opt)));
                if kind == NormKind::Frobenius {
                    (best, true)
                } else {
                    let fa = set_a.freedom_dim();
                    let sampled = (0..samples)
                        .map(|_| {
                            let w = haar_orthogonal(fa, &mut inner_rng);
                            kind.of_matrix(&(y_tilde - set_a.member_unchecked(&w)))
                        })
                        .fold(best, f64::min);
                    (sampled, false)
                }
            }
        };
        inner_exact &= exact;
        value = value.max(dist);
    }

    let quality = match (outer_exact, inner_exact) {
        (true, true) => EstimateQuality::Exact,
        (false, true) => EstimateQuality::LowerBound,
        _ => EstimateQuality::Approximate,
    };
    Ok(HausdorffEstimate { value, quality })
}

/// Departure of `XᵀD` from symmetric positive semidefiniteness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlignmentDefect {
    /// ‖XᵀD − DᵀX‖_F.
    pub asymmetry: f64,
    /// Smallest eigenvalue of the symmetric part.
    pub min_eigenvalue: f64,
}

pub fn alignment_defect(x: &DenseMatrix, d: &DenseMatrix) -> AlignmentDefect {
    let m = x.transpose() * d;
    let asymmetry = (&m - m.transpose()).norm();
    let sym = (&m + m.transpose()) * 0.5;
    let min_eigenvalue = SymmetricEigen::new(sym).eigenvalues.min();
    AlignmentDefect {
        asymmetry,
        min_eigenvalue,
    }
}

/// Checks that `xᵀd` is symmetric PSD to `PSD_TOL · ‖D‖₂`.
pub fn check_aligned(x: &OrthonormalBasis, d: &DenseMatrix) -> Result<()> {
    if d.shape() != x.matrix().shape() {
        return Err(Error::DimensionMismatch {
            expected: shape_str(x.n(), x.k()),
            got: shape_str(d.nrows(), d.ncols()),
        });
    }
    let tol = PSD_TOL * spectral_norm(d);
    let defect = alignment_defect(x.matrix(), d);
    if defect.asymmetry > tol {
        return Err(Error::NotAligned(format!(
            "asymmetry {:e} exceeds {tol:e}",
            defect.asymmetry
        )));
    }
    if defect.min_eigenvalue < -tol {
        return Err(Error::NotAligned(format!(
            "smallest eigenvalue {:e} below {:e}",
            defect.min_eigenvalue, -tol
        )));
    }
    Ok(())
}
