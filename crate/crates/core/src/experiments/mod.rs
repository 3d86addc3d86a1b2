//! Deterministic δ-sweeps over a family of subspace pairs with k equal
//! canonical angles, comparing the measured basis error with ξ.
//!
//! Pair construction: with `M = H_n / √n` for a Hadamard matrix `H_n`,
//!
//! ```text
//! X_◇ = M(:, 1:k),   X̃_◇ = √(1 − δ²) M(:, 1:k) Q₁ + δ M(:, k+1:2k) Q₂
//! ```
//!
//! so every canonical angle has sine δ. `Q₁` and `Q₂` are Haar-random and
//! drawn from streams `2i` and `2i + 1` of the configured seed, where `i` is
//! the index of δ in the grid.

mod plot;

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{analyze_instance, InstanceAnalysis, MeasuredMethod};
use crate::error::{Error, Result};
use crate::kernels::{hadamard, hadamard_signs, DenseMatrix, NormKind, NormValues, OrthonormalBasis, RankPolicy};
use crate::polar::{align_with, DEFAULT_W_SAMPLES};
use crate::sampling::{haar_orthogonal, rng_for};
use crate::subspace::canonical_angles;

pub use plot::{log_log_svg, Series};

/// Rank decisions for `XᵀD` in sweeps. The test matrices have σ_r near 1 and
/// exact zero columns, so any threshold far from both works.
pub const SWEEP_RANK_POLICY: RankPolicy = RankPolicy::Relative(1e-10);

/// Relative tolerance of [`verify_closed_form`].
pub const CLOSED_FORM_RTOL: f64 = 1e-9;

/// Tolerance of the closed-form sin-Θ cross-check on each sweep row.
pub const CROSS_CHECK_TOL: f64 = 1e-9;

/// How far a sampled member may beat the reported minimum.
pub const ORACLE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: usize,
    pub k: usize,
    pub deltas: Vec<f64>,
    /// Number of trailing columns of D set to zero.
    #[serde(alias = "zero_last")]
    pub rank_deficiency: usize,
    pub seed: u64,
    pub norms: Vec<NormKind>,
    pub w_samples: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 96,
            k: 5,
            deltas: log_grid(1e-12, 1e-2, 40),
            rank_deficiency: 0,
            seed: 0,
            norms: NormKind::ALL.to_vec(),
            w_samples: DEFAULT_W_SAMPLES,
        }
    }
}

impl ExperimentConfig {
    /// Figure 1, 2 or 3: D has 0, 1 or 2 zeroed trailing columns.
    pub fn figure(figure: u8) -> Result<Self> {
        if !(1..=3).contains(&figure) {
            return Err(Error::InvalidInput(format!("figure must be 1, 2 or 3, got {figure}")));
        }
        Ok(Self {
            rank_deficiency: figure as usize - 1,
            ..Self::default()
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || 2 * self.k > self.n {
            return Err(Error::InvalidInput(format!(
                "need 1 <= k and 2k <= n, got n = {}, k = {}",
                self.n, self.k
            )));
        }
        hadamard_signs(self.n)?;
        if self.deltas.is_empty() {
            return Err(Error::InvalidInput("delta grid is empty".into()));
        }
        if let Some(d) = self.deltas.iter().find(|d| !(**d > 0.0 && **d < 1.0)) {
            return Err(Error::InvalidInput(format!("deltas must lie in (0, 1), got {d}")));
        }
        if self.rank_deficiency >= self.k {
            return Err(Error::InvalidInput(format!(
                "rank deficiency {} leaves no nonzero column of D (k = {})",
                self.rank_deficiency, self.k
            )));
        }
        if self.norms.is_empty() {
            return Err(Error::InvalidInput("no norms requested".into()));
        }
        Ok(())
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let cfg: Self = serde_json::from_str(&fs::read_to_string(path)?)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// `points` values spaced evenly in log scale from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.log10(), hi.log10());
            (0..points)
                .map(|i| {
                    if i == points - 1 {
                        hi
                    } else {
                        10f64.powf(a + (b - a) * i as f64 / (points - 1) as f64)
                    }
                })
                .collect()
        }
    }
}

/// The two bases of one sweep point before alignment.
#[derive(Debug, Clone)]
pub struct TestPair {
    pub x_diamond: OrthonormalBasis,
    pub x_tilde_diamond: OrthonormalBasis,
    pub q1: DenseMatrix,
    pub q2: DenseMatrix,
}

/// Builds the pair for `delta` (any value in [0, 1]) using the random
/// streams of grid position `index`.
pub fn make_pair(config: &ExperimentConfig, delta: f64, index: usize) -> Result<TestPair> {
    let (n, k) = (config.n, config.k);
    if k == 0 || 2 * k > n {
        return Err(Error::InvalidInput(format!("need 1 <= k and 2k <= n, got n = {n}, k = {k}")));
    }
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::InvalidInput(format!("delta must lie in [0, 1], got {delta}")));
    }
    let m = hadamard(n)? / (n as f64).sqrt();
    let m1 = m.columns(0, k).into_owned();
    let m2 = m.columns(k, k).into_owned();
    let q1 = haar_orthogonal(k, &mut rng_for(config.seed, 2 * index as u64));
    let q2 = haar_orthogonal(k, &mut rng_for(config.seed, 2 * index as u64 + 1));
    let c = (1.0 - delta * delta).sqrt();
    let xt = &m1 * &q1 * c + &m2 * &q2 * delta;
    Ok(TestPair {
        x_diamond: OrthonormalBasis::new(m1)?,
        x_tilde_diamond: OrthonormalBasis::new(xt)?,
        q1,
        q2,
    })
}

/// The n x k test matrix: identity on top, row `i >= k` (zero-based) holding
/// `(i + 1) / (8n + j)` in column `j`, and the last `zero_last` columns zeroed.
pub fn test_d(n: usize, k: usize, zero_last: usize) -> Result<DenseMatrix> {
    if zero_last > k {
        return Err(Error::InvalidInput(format!("cannot zero {zero_last} of {k} columns")));
    }
    if k > n {
        return Err(Error::InvalidInput(format!("need k <= n, got n = {n}, k = {k}")));
    }
    let mut d = DenseMatrix::from_fn(n, k, |i, j| {
        if i < k {
            if i == j { 1.0 } else { 0.0 }
        } else {
            (i + 1) as f64 / (8 * n + j) as f64
        }
    });
    for j in k - zero_last..k {
        d.column_mut(j).fill(0.0);
    }
    Ok(d)
}

/// One (δ, norm) point of a sweep. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub delta: f64,
    pub kind: NormKind,
    /// Closed form: δ, √k δ or k δ.
    pub sin_theta: f64,
    pub sin_theta_computed: f64,
    /// Upper end of `[measured_lower, measured_upper]`.
    pub measured: f64,
    pub measured_lower: f64,
    pub measured_upper: f64,
    pub xi: f64,
    pub xi_sharpened: Option<f64>,
    pub slack: f64,
    pub sigma_r: f64,
    pub sigma_r_tilde: f64,
    pub r: usize,
    pub measured_method: Option<MeasuredMethod>,
    /// Best of `w_samples` random members minus `measured_lower`; only for
    /// k − r ≥ 2.
    pub oracle_margin: Option<f64>,
    pub ok: bool,
    pub note: String,
}

impl SweepRow {
    fn failed(delta: f64, kind: NormKind, k: usize, note: String) -> Self {
        Self {
            delta,
            kind,
            sin_theta: closed_form(kind, k, delta),
            sin_theta_computed: f64::NAN,
            measured: f64::NAN,
            measured_lower: f64::NAN,
            measured_upper: f64::NAN,
            xi: f64::NAN,
            xi_sharpened: None,
            slack: f64::NAN,
            sigma_r: f64::NAN,
            sigma_r_tilde: f64::NAN,
            r: 0,
            measured_method: None,
            oracle_margin: None,
            ok: false,
            note,
        }
    }
}

/// ‖sin Θ‖ for k equal angles with sine δ.
pub fn closed_form(kind: NormKind, k: usize, delta: f64) -> f64 {
    match kind {
        NormKind::Spectral => delta,
        NormKind::Frobenius => (k as f64).sqrt() * delta,
        NormKind::Trace => k as f64 * delta,
    }
}

/// The aligned pair of grid point `index`.
pub fn aligned_pair(
    config: &ExperimentConfig,
    d: &DenseMatrix,
    delta: f64,
    index: usize,
) -> Result<(OrthonormalBasis, OrthonormalBasis)> {
    let pair = make_pair(config, delta, index)?;
    let (x, _) = align_with(&pair.x_diamond, d, SWEEP_RANK_POLICY)?;
    let (xt, _) = align_with(&pair.x_tilde_diamond, d, SWEEP_RANK_POLICY)?;
    Ok((x, xt))
}

fn sweep_point(
    config: &ExperimentConfig,
    d: &DenseMatrix,
    delta: f64,
    index: usize,
) -> Vec<SweepRow> {
    let analysis = aligned_pair(config, d, delta, index)
        .and_then(|(x, xt)| analyze_instance(&x, &xt, d, SWEEP_RANK_POLICY).map(|a| (a, xt)));
    let (analysis, xt) = match analysis {
        Ok(v) => v,
        Err(e) => {
            return config
                .norms
                .iter()
                .map(|&kind| SweepRow::failed(delta, kind, config.k, e.to_string()))
                .collect()
        }
    };
    let oracle = oracle_minima(&analysis, &xt, config, index);
    config
        .norms
        .iter()
        .map(|&kind| {
            let rep = match analysis.report(kind) {
                Ok(rep) => rep,
                Err(e) => return SweepRow::failed(delta, kind, config.k, e.to_string()),
            };
            let sin_theta = closed_form(kind, config.k, delta);
            let mut notes = Vec::new();
            if (sin_theta - rep.sin_theta).abs() > CROSS_CHECK_TOL * (1.0 + sin_theta) {
                notes.push("sin-theta cross-check failed");
            }
            if !(rep.measured <= rep.xi) {
                notes.push("measured exceeds xi");
            }
            let oracle_margin = oracle.as_ref().map(|o| o.get(kind) - rep.measured_lower);
            if oracle_margin.is_some_and(|m| m < -ORACLE_TOL) {
                notes.push("sampled member beats reported minimum");
            }
            if analysis.r() + config.rank_deficiency != config.k {
                notes.push("unexpected rank");
            }
            SweepRow {
                delta,
                kind,
                sin_theta,
                sin_theta_computed: rep.sin_theta,
                measured: rep.measured,
                measured_lower: rep.measured_lower,
                measured_upper: rep.measured_upper,
                xi: rep.xi,
                xi_sharpened: rep.xi_sharpened,
                slack: rep.slack,
                sigma_r: rep.sigma_r,
                sigma_r_tilde: rep.sigma_r_tilde,
                r: rep.r,
                measured_method: Some(rep.measured_method),
                oracle_margin,
                ok: notes.is_empty(),
                note: notes.join("; "),
            }
        })
        .collect()
}

/// Smallest ‖X̃ − Y(W)‖ over `w_samples` Haar-random W, per norm, when the
/// aligned set is infinite.
fn oracle_minima(
    analysis: &InstanceAnalysis,
    xt: &OrthonormalBasis,
    config: &ExperimentConfig,
    index: usize,
) -> Option<NormValues> {
    let set = &analysis.set;
    if set.freedom_dim() < 2 || config.w_samples == 0 {
        return None;
    }
    // streams past the 2·len pair streams
    let mut rng = rng_for(config.seed, (2 * config.deltas.len() + index) as u64);
    let mut best = NormValues {
        spectral: f64::INFINITY,
        frobenius: f64::INFINITY,
        trace: f64::INFINITY,
    };
    for _ in 0..config.w_samples {
        let w = haar_orthogonal(set.freedom_dim(), &mut rng);
        let e = NormValues::of_matrix(&(xt.matrix() - set.member_unchecked(&w)));
        best.spectral = best.spectral.min(e.spectral);
        best.frobenius = best.frobenius.min(e.frobenius);
        best.trace = best.trace.min(e.trace);
    }
    Some(best)
}

/// Rows for every (δ, norm), in grid order then norm order. Points run in
/// parallel; results do not depend on scheduling.
pub fn run_sweep(config: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let d = test_d(config.n, config.k, config.rank_deficiency)?;
    let rows: Vec<Vec<SweepRow>> = config
        .deltas
        .par_iter()
        .enumerate()
        .map(|(i, &delta)| sweep_point(config, &d, delta, i))
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

/// Least-squares slope of log10(y) against log10(x) over positive pairs.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.log10(), y.log10()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Shape statistics of one norm's curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveSummary {
    pub kind: NormKind,
    pub slope_measured: Option<f64>,
    pub slope_xi: Option<f64>,
    /// max slack / min slack over finite slacks.
    pub slack_band: Option<f64>,
    pub rows: usize,
    pub failed_rows: usize,
}

pub fn summarize(rows: &[SweepRow], kind: NormKind) -> CurveSummary {
    let sel: Vec<&SweepRow> = rows.iter().filter(|r| r.kind == kind).collect();
    let pairs = |f: fn(&SweepRow) -> f64| sel.iter().map(|r| (r.delta, f(r))).collect::<Vec<_>>();
    let slacks: Vec<f64> = sel.iter().map(|r| r.slack).filter(|s| s.is_finite() && *s > 0.0).collect();
    let slack_band = (!slacks.is_empty()).then(|| {
        let max = slacks.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = slacks.iter().cloned().fold(f64::INFINITY, f64::min);
        max / min
    });
    CurveSummary {
        kind,
        slope_measured: loglog_slope(&pairs(|r| r.measured)),
        slope_xi: loglog_slope(&pairs(|r| r.xi)),
        slack_band,
        rows: sel.len(),
        failed_rows: sel.iter().filter(|r| !r.ok).count(),
    }
}

pub fn write_csv(rows: &[SweepRow], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// One log-log chart of measured error and ξ against δ.
pub fn render_svg(rows: &[SweepRow], kind: NormKind, rank_deficiency: usize) -> String {
    let sel: Vec<&SweepRow> = rows.iter().filter(|r| r.kind == kind).collect();
    let pts = |f: fn(&SweepRow) -> f64| sel.iter().map(|r| (r.delta, f(r))).collect::<Vec<_>>();
    let sandwich = sel
        .iter()
        .any(|r| r.measured_method == Some(MeasuredMethod::Sandwich));
    let mut series = Vec::new();
    if sandwich {
        series.push(Series::new("upper (Y_opt)", "#1f77b4", pts(|r| r.measured_upper)));
        series.push(Series::new("lower", "#2ca02c", pts(|r| r.measured_lower)).dashed());
    } else {
        series.push(Series::new("measured", "#1f77b4", pts(|r| r.measured)));
    }
    series.push(Series::new("xi", "#d62728", pts(|r| r.xi)));
    if sel.iter().any(|r| r.xi_sharpened.is_some()) {
        series.push(
            Series::new(
                "xi sharpened",
                "#ff7f0e",
                sel.iter().map(|r| (r.delta, r.xi_sharpened.unwrap_or(f64::NAN))).collect(),
            )
            .dashed(),
        );
    }
    let title = format!("{kind} norm, {rank_deficiency} zeroed column(s) of D");
    log_log_svg(&title, "delta", "basis error", &series)
}

/// Writes `sweep.csv`, `sweep_<norm>.svg` per norm and `config.json` into
/// `dir`, creating it if needed.
pub fn write_outputs(config: &ExperimentConfig, rows: &[SweepRow], dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    write_csv(rows, dir.join("sweep.csv"))?;
    for &kind in &config.norms {
        fs::write(
            dir.join(format!("sweep_{kind}.svg")),
            render_svg(rows, kind, config.rank_deficiency),
        )?;
    }
    fs::write(dir.join("config.json"), serde_json::to_string_pretty(config)? + "\n")?;
    Ok(())
}

/// Computed and closed-form sin-Θ norms at one δ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormReport {
    pub delta: f64,
    pub expected: NormValues,
    pub computed: NormValues,
    /// |computed − expected| / expected per norm (absolute when δ = 0).
    pub error: NormValues,
}

/// Compares the computed sin-Θ norms of the pair at `delta` with δ, √k δ and
/// k δ to [`CLOSED_FORM_RTOL`]. Uses the random streams of `delta`'s grid
/// position, or of position 0 if it is not on the grid.
pub fn verify_closed_form(config: &ExperimentConfig, delta: f64) -> Result<ClosedFormReport> {
    verify_closed_form_with(config, delta, CLOSED_FORM_RTOL)
}

pub fn verify_closed_form_with(config: &ExperimentConfig, delta: f64, rtol: f64) -> Result<ClosedFormReport> {
    let index = config.deltas.iter().position(|&d| d == delta).unwrap_or(0);
    let pair = make_pair(config, delta, index)?;
    let a = canonical_angles(&pair.x_diamond, &pair.x_tilde_diamond)?;
    let computed = NormValues::from_singular_values(a.sines());
    let k = config.k;
    let expected = NormValues {
        spectral: closed_form(NormKind::Spectral, k, delta),
        frobenius: closed_form(NormKind::Frobenius, k, delta),
        trace: closed_form(NormKind::Trace, k, delta),
    };
    let err = |kind: NormKind| {
        let (e, c) = (expected.get(kind), computed.get(kind));
        if e == 0.0 { c.abs() } else { (c - e).abs() / e }
    };
    let error = NormValues {
        spectral: err(NormKind::Spectral),
        frobenius: err(NormKind::Frobenius),
        trace: err(NormKind::Trace),
    };
    // δ = 0: absolute check at a rounding-level threshold
    let tol = if delta == 0.0 { 1e-14 * k as f64 } else { rtol };
    for kind in NormKind::ALL {
        if !(error.get(kind) <= tol) {
            return Err(Error::VerificationFailure {
                norm: kind,
                delta,
                expected: expected.get(kind),
                computed: computed.get(kind),
            });
        }
    }
    Ok(ClosedFormReport {
        delta,
        expected,
        computed,
        error,
    })
}
