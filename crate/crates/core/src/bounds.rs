//! Explicit perturbation bounds: the singular-subspace sin-Θ bound, the
//! polar-factor bound, the η constants of the main theorem and the resulting
//! ξ = η‖sin Θ‖ estimates, plus measured-versus-bound reports.

use std::f64::consts::SQRT_2;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::kernels::{svd, truncated_norm, DenseMatrix, NormKind, OrthonormalBasis, RankPolicy};
use crate::polar::{align_with, check_aligned, optimal_representative, AlignedBasisSet};
use crate::subspace::{canonical_angles, sin_theta_norm, truncated_sin_theta_norm, AngleSpectrum};

/// Which η formula applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaBranch {
    /// r = k, any norm.
    FullRank,
    /// r < k, Frobenius norm.
    ImprovedFrobenius,
    /// r < k, spectral norm.
    ImprovedSpectral,
    /// r < k, any other unitarily invariant norm (here: trace).
    Generic,
}

impl EtaBranch {
    pub fn select(kind: NormKind, r: usize, k: usize) -> Self {
        if r == k {
            return EtaBranch::FullRank;
        }
        match kind {
            NormKind::Frobenius => EtaBranch::ImprovedFrobenius,
            NormKind::Spectral => EtaBranch::ImprovedSpectral,
            NormKind::Trace => EtaBranch::Generic,
        }
    }

    /// η for this branch. Inputs are assumed validated.
    pub fn value(self, sigma_r: f64, sigma_r_tilde: f64, d_norm: f64) -> f64 {
        let s = sigma_r + sigma_r_tilde;
        let m = sigma_r.max(sigma_r_tilde);
        let base = SQRT_2 * (1.0 + 2.0 * d_norm / s);
        match self {
            EtaBranch::FullRank => base,
            EtaBranch::Generic => base + (2.0 * SQRT_2 + 4.0) * d_norm / m,
            EtaBranch::ImprovedFrobenius => base + 4.0 * d_norm / m,
            EtaBranch::ImprovedSpectral => {
                let a = 8.0 * d_norm * d_norm / (s * s);
                let b = 4.0 * d_norm * d_norm / (m * m);
                SQRT_2 + (a + b).sqrt() + 4.0 * d_norm / m
            }
        }
    }
}

fn check_eta_inputs(r: usize, k: usize, sigma_r: f64, sigma_r_tilde: f64, d_norm: f64) -> Result<()> {
    if r == 0 || r > k {
        return Err(Error::InvalidInput(format!("need 1 <= r <= k, got r = {r}, k = {k}")));
    }
    if !(sigma_r > 0.0 && sigma_r.is_finite() && sigma_r_tilde > 0.0 && sigma_r_tilde.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "singular values must be positive, got {sigma_r:e} and {sigma_r_tilde:e}"
        )));
    }
    if !(d_norm >= 0.0 && d_norm.is_finite()) {
        return Err(Error::InvalidInput(format!("‖D‖₂ must be finite and nonnegative, got {d_norm:e}")));
    }
    Ok(())
}

pub fn eta(kind: NormKind, r: usize, k: usize, sigma_r: f64, sigma_r_tilde: f64, d_norm: f64) -> Result<f64> {
    check_eta_inputs(r, k, sigma_r, sigma_r_tilde, d_norm)?;
    Ok(EtaBranch::select(kind, r, k).value(sigma_r, sigma_r_tilde, d_norm))
}

/// ξ = η · ‖sin Θ‖.
pub fn xi(
    kind: NormKind,
    r: usize,
    k: usize,
    sigma_r: f64,
    sigma_r_tilde: f64,
    d_norm: f64,
    sin_theta: f64,
) -> Result<f64> {
    if !(sin_theta >= 0.0) {
        return Err(Error::InvalidInput(format!("sin-theta norm must be >= 0, got {sin_theta}")));
    }
    Ok(eta(kind, r, k, sigma_r, sigma_r_tilde, d_norm)? * sin_theta)
}

/// ξ with ‖sin Θ‖ replaced by the norm of its r largest sines. Only defined
/// for r < k; uses the same η as [`xi`], so it never exceeds it.
pub fn xi_sharpened(
    kind: NormKind,
    r: usize,
    k: usize,
    sigma_r: f64,
    sigma_r_tilde: f64,
    d_norm: f64,
    truncated_sin_theta: f64,
) -> Result<f64> {
    if r >= k {
        return Err(Error::NotApplicable("sharpened bound needs r < k"));
    }
    xi(kind, r, k, sigma_r, sigma_r_tilde, d_norm, truncated_sin_theta)
}

/// Singular-subspace perturbation: two bounds and the measured sin-Θ norms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WedinBound {
    /// ‖[F]_(r)‖ / max{σ_r(B), σ_r(B̃)}.
    pub bound_a: f64,
    /// ‖F‖ / max{σ_r(B), σ_r(B̃)}.
    pub bound_b: f64,
    /// ‖sin Θ(U_r, Ũ_r)‖.
    pub measured_u: f64,
    /// ‖sin Θ(V_r, Ṽ_r)‖.
    pub measured_v: f64,
}

pub fn wedin_bound(b: &DenseMatrix, b_tilde: &DenseMatrix, r: usize, kind: NormKind) -> Result<WedinBound> {
    wedin_bound_with(b, b_tilde, r, kind, RankPolicy::Default)
}

pub fn wedin_bound_with(
    b: &DenseMatrix,
    b_tilde: &DenseMatrix,
    r: usize,
    kind: NormKind,
    policy: RankPolicy,
) -> Result<WedinBound> {
    same_shape(b, b_tilde)?;
    let f = svd(b, policy)?;
    let ft = svd(b_tilde, policy)?;
    equal_rank(f.numerical_rank, ft.numerical_rank, r)?;

    let diff = b_tilde - b;
    let denom = f.sigma[r - 1].max(ft.sigma[r - 1]);
    let bound_a = truncated_norm(&diff, r, kind)? / denom;
    let bound_b = kind.of_matrix(&diff) / denom;

    let leading = |m: &DenseMatrix| OrthonormalBasis::new(m.columns(0, r).into_owned());
    let au = canonical_angles(&leading(&f.u)?, &leading(&ft.u)?)?;
    let av = canonical_angles(&leading(&f.v)?, &leading(&ft.v)?)?;
    Ok(WedinBound {
        bound_a,
        bound_b,
        measured_u: sin_theta_norm(&au, kind),
        measured_v: sin_theta_norm(&av, kind),
    })
}

/// Perturbation of the canonical polar factor of a tall or square matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolarBound {
    /// Bound valid for every unitarily invariant norm.
    pub general: f64,
    /// Sharper bound for the spectral and Frobenius norms when n > m or r < n.
    pub improved: Option<f64>,
    /// ‖Q − Q̃‖.
    pub measured: f64,
}

pub fn polar_perturbation_bound(
    b: &DenseMatrix,
    b_tilde: &DenseMatrix,
    kind: NormKind,
    policy: RankPolicy,
) -> Result<PolarBound> {
    same_shape(b, b_tilde)?;
    let (n, m) = b.shape();
    if n < m {
        return Err(Error::ShapeError(format!("polar bound needs rows >= cols, got {n}x{m}")));
    }
    let f = svd(b, policy)?;
    let ft = svd(b_tilde, policy)?;
    let r = f.numerical_rank;
    equal_rank(r, ft.numerical_rank, r)?;
    if r == 0 {
        return Err(Error::InvalidInput("polar bound needs nonzero matrices".into()));
    }

    let q = f.u1() * f.v1().transpose();
    let qt = ft.u1() * ft.v1().transpose();
    let measured = kind.of_matrix(&(&q - &qt));

    let diff = b_tilde - b;
    let fnorm = kind.of_matrix(&diff);
    let (sr, srt) = (f.sigma[r - 1], ft.sigma[r - 1]);
    let s = sr + srt;
    let mx = sr.max(srt);

    let general = if r == n && n == m {
        2.0 / s * fnorm
    } else {
        (2.0 / s + 2.0 / mx) * fnorm
    };
    let improved = if n > m || r < n {
        match kind {
            NormKind::Frobenius => Some(2.0 / s * fnorm),
            NormKind::Spectral => Some((4.0 / (s * s) + 2.0 / (mx * mx)).sqrt() * fnorm),
            NormKind::Trace => None,
        }
    } else {
        None
    };
    Ok(PolarBound {
        general,
        improved,
        measured,
    })
}

fn same_shape(b: &DenseMatrix, b_tilde: &DenseMatrix) -> Result<()> {
    if b.shape() != b_tilde.shape() {
        return Err(Error::DimensionMismatch {
            expected: crate::error::shape_str(b.nrows(), b.ncols()),
            got: crate::error::shape_str(b_tilde.nrows(), b_tilde.ncols()),
        });
    }
    Ok(())
}

fn equal_rank(left: usize, right: usize, r: usize) -> Result<()> {
    if left != right {
        return Err(Error::RankMismatch { left, right });
    }
    if left != r {
        return Err(Error::RankMismatch { left: r, right: left });
    }
    if r == 0 {
        return Err(Error::InvalidInput("rank must be at least 1".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    FullRank,
    RankDeficient,
}

/// How `measured` was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasuredMethod {
    /// r = k: ‖X̃ − X‖.
    Direct,
    /// k − r = 1: minimum over the two members.
    TwoMember,
    /// Frobenius, k − r ≥ 2: ‖X̃ − Y_opt‖_F, the exact minimum.
    Optimal,
    /// Spectral or trace, k − r ≥ 2: an interval around the minimum built
    /// from Y_opt; `measured` is its upper end.
    Sandwich,
}

/// Measured error and bound for one instance and one norm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub kind: NormKind,
    pub regime: Regime,
    pub r: usize,
    pub k: usize,
    pub sigma_r: f64,
    pub sigma_r_tilde: f64,
    pub d_norm: f64,
    pub sin_theta: f64,
    pub sin_theta_truncated: f64,
    pub eta: f64,
    pub xi: f64,
    /// `None` when r = k.
    pub xi_sharpened: Option<f64>,
    pub measured: f64,
    #[serde(serialize_with = "ser_slack")]
    pub slack: f64,
    pub eta_branch: EtaBranch,
    pub measured_method: MeasuredMethod,
    pub measured_lower: f64,
    pub measured_upper: f64,
    pub rank_tolerance: f64,
}

impl BoundReport {
    /// True when the bound covers the measured error up to `tol`.
    pub fn holds(&self, tol: f64) -> bool {
        self.measured <= self.xi + tol
    }
}

fn ser_slack<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

/// The norm-independent part of an instance, computed once and reported for
/// any number of norms.
#[derive(Debug, Clone)]
pub struct InstanceAnalysis {
    pub angles: AngleSpectrum,
    pub set: AlignedBasisSet,
    pub set_tilde: AlignedBasisSet,
    x: DenseMatrix,
    x_tilde: DenseMatrix,
    y_opt: Option<DenseMatrix>,
}

/// Checks the hypotheses (both products PSD, equal ranks) and precomputes
/// angles, the aligned set of `x` and the Frobenius-optimal member.
pub fn analyze_instance(
    x: &OrthonormalBasis,
    x_tilde: &OrthonormalBasis,
    d: &DenseMatrix,
    policy: RankPolicy,
) -> Result<InstanceAnalysis> {
    check_aligned(x, d)?;
    check_aligned(x_tilde, d)?;
    let (_, set) = align_with(x, d, policy)?;
    let (_, set_tilde) = align_with(x_tilde, d, policy)?;
    if set.r != set_tilde.r {
        return Err(Error::RankMismatch {
            left: set.r,
            right: set_tilde.r,
        });
    }
    if set.r == 0 {
        return Err(Error::NotApplicable("X^T D = 0: no bound for r = 0"));
    }
    let angles = canonical_angles(x, x_tilde)?;
    let y_opt = if set.freedom_dim() >= 2 {
        Some(optimal_representative(&set, x_tilde)?.0.into_matrix())
    } else {
        None
    };
    Ok(InstanceAnalysis {
        angles,
        set,
        set_tilde,
        x: x.matrix().clone(),
        x_tilde: x_tilde.matrix().clone(),
        y_opt,
    })
}

impl InstanceAnalysis {
    pub fn r(&self) -> usize {
        self.set.r
    }

    pub fn k(&self) -> usize {
        self.set.k()
    }

    /// (lower, upper, method) for min over the aligned set of ‖X̃ − Y‖.
    pub fn measured(&self, kind: NormKind) -> (f64, f64, MeasuredMethod) {
        if let Some(members) = self.set.finite_members() {
            let method = if members.len() == 1 {
                MeasuredMethod::Direct
            } else {
                MeasuredMethod::TwoMember
            };
            // r = k: the only member is X itself (up to rounding); use X.
            let v = if members.len() == 1 {
                kind.of_matrix(&(&self.x_tilde - &self.x))
            } else {
                members
                    .iter()
                    .map(|y| kind.of_matrix(&(&self.x_tilde - y)))
                    .fold(f64::INFINITY, f64::min)
            };
            return (v, v, method);
        }
        let e = &self.x_tilde - self.y_opt.as_ref().expect("y_opt exists when k - r >= 2");
        let fro = e.norm();
        match kind {
            NormKind::Frobenius => (fro, fro, MeasuredMethod::Optimal),
            NormKind::Spectral => (
                fro / (self.k() as f64).sqrt(),
                kind.of_matrix(&e),
                MeasuredMethod::Sandwich,
            ),
            NormKind::Trace => (fro, kind.of_matrix(&e), MeasuredMethod::Sandwich),
        }
    }

    pub fn report(&self, kind: NormKind) -> Result<BoundReport> {
        let (r, k) = (self.r(), self.k());
        let sigma_r = self.set.sigma_r.expect("r >= 1");
        let sigma_r_tilde = self.set_tilde.sigma_r.expect("r >= 1");
        let d_norm = self.set.d_spectral_norm;
        let sin_theta = sin_theta_norm(&self.angles, kind);
        let sin_theta_truncated = truncated_sin_theta_norm(&self.angles, r, kind)?;
        let eta_v = eta(kind, r, k, sigma_r, sigma_r_tilde, d_norm)?;
        let xi_v = eta_v * sin_theta;
        let xi_sh = if r < k {
            Some(xi_sharpened(kind, r, k, sigma_r, sigma_r_tilde, d_norm, sin_theta_truncated)?)
        } else {
            None
        };
        let (lower, upper, method) = self.measured(kind);
        let slack = if upper == 0.0 { f64::INFINITY } else { xi_v / upper };
        Ok(BoundReport {
            kind,
            regime: if r == k { Regime::FullRank } else { Regime::RankDeficient },
            r,
            k,
            sigma_r,
            sigma_r_tilde,
            d_norm,
            sin_theta,
            sin_theta_truncated,
            eta: eta_v,
            xi: xi_v,
            xi_sharpened: xi_sh,
            measured: upper,
            slack,
            eta_branch: EtaBranch::select(kind, r, k),
            measured_method: method,
            measured_lower: lower,
            measured_upper: upper,
            rank_tolerance: self.set.rank_tolerance.max(self.set_tilde.rank_tolerance),
        })
    }
}

/// Bound report for one norm with the default rank policy.
pub fn evaluate_instance(
    x: &OrthonormalBasis,
    x_tilde: &OrthonormalBasis,
    d: &DenseMatrix,
    kind: NormKind,
) -> Result<BoundReport> {
    analyze_instance(x, x_tilde, d, RankPolicy::Default)?.report(kind)
}
