//! Canonical angles between equal-dimensional subspaces and the sin-Θ
//! distances built on them.

use serde::Serialize;

use crate::error::{shape_str, Error, Result};
use crate::kernels::{
    orthonormal_completion, singular_values, DenseMatrix, NormKind, NormValues, OrthonormalBasis,
};
use crate::polar::orthogonal_polar_factor;

/// Cosines and sines of the canonical angles θ₁ ≤ … ≤ θ_k.
///
/// `cosines` is nonincreasing and `sines` nondecreasing, so index `i` of
/// both refers to θ_{i+1}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngleSpectrum {
    cosines: Vec<f64>,
    sines: Vec<f64>,
}

impl AngleSpectrum {
    /// Builds a spectrum from cosines in any order and sines in any order,
    /// clamping both to [0, 1].
    pub fn from_parts(mut cosines: Vec<f64>, mut sines: Vec<f64>) -> Result<Self> {
        if cosines.len() != sines.len() || cosines.is_empty() {
            return Err(Error::InvalidInput(format!(
                "need equally many cosines and sines, got {} and {}",
                cosines.len(),
                sines.len()
            )));
        }
        if cosines.iter().chain(&sines).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite angle data".into()));
        }
        for v in cosines.iter_mut().chain(sines.iter_mut()) {
            *v = v.clamp(0.0, 1.0);
        }
        cosines.sort_by(|a, b| b.total_cmp(a));
        sines.sort_by(f64::total_cmp);
        Ok(Self { cosines, sines })
    }

    /// Spectrum of `k` angles that all have the given sine.
    pub fn uniform(k: usize, sine: f64) -> Result<Self> {
        let c = (1.0 - sine * sine).max(0.0).sqrt();
        Self::from_parts(vec![c; k], vec![sine; k])
    }

    pub fn k(&self) -> usize {
        self.sines.len()
    }

    pub fn cosines(&self) -> &[f64] {
        &self.cosines
    }

    pub fn sines(&self) -> &[f64] {
        &self.sines
    }

    /// Cosine paired with `sines()[i]`.
    pub fn paired_cosine(&self, i: usize) -> f64 {
        self.cosines[i]
    }

    /// θ_i in radians, ascending. Informational only; distances never go
    /// through an inverse trigonometric function.
    pub fn angles(&self) -> Vec<f64> {
        (0..self.k())
            .map(|i| self.sines[i].atan2(self.paired_cosine(i)))
            .collect()
    }
}

/// Canonical angles between R(x) and R(y).
///
/// Cosines are the singular values of `XᵀY`; sines are the singular values
/// of `X_⊥ᵀY`, which keeps them accurate for tiny angles.
pub fn canonical_angles(x: &OrthonormalBasis, y: &OrthonormalBasis) -> Result<AngleSpectrum> {
    if x.n() != y.n() || x.k() != y.k() {
        return Err(Error::DimensionMismatch {
            expected: shape_str(x.n(), x.k()),
            got: shape_str(y.n(), y.k()),
        });
    }
    let k = x.k();
    let cosines = singular_values(&(x.matrix().transpose() * y.matrix()));

    let mut sines = if x.n() == k {
        Vec::new()
    } else {
        let perp = orthonormal_completion(x)?;
        singular_values(&(perp.transpose() * y.matrix()))
    };
    // X_⊥ᵀY has only n - k singular values when n - k < k; the rest are 0.
    sines.resize(k, 0.0);
    AngleSpectrum::from_parts(cosines, sines)
}

/// ‖sin Θ‖ in the requested norm.
pub fn sin_theta_norm(angles: &AngleSpectrum, kind: NormKind) -> f64 {
    kind.of_values(angles.sines())
}

/// Norm of the `r` largest sines, ‖[sin Θ]_(r)‖.
pub fn truncated_sin_theta_norm(angles: &AngleSpectrum, r: usize, kind: NormKind) -> Result<f64> {
    if r == 0 {
        return Err(Error::InvalidInput("truncation rank must be at least 1".into()));
    }
    let s = angles.sines();
    Ok(kind.of_values(&s[s.len().saturating_sub(r)..]))
}

/// Orthogonal `q` bringing `y` onto `x`, together with ‖X − Y Q‖.
#[derive(Debug, Clone)]
pub struct RotationAlignment {
    pub q: DenseMatrix,
    pub residuals: NormValues,
}

/// Rotation `Q` with ‖sin Θ‖ ≤ ‖X − YQ‖ ≤ √2 ‖sin Θ‖ in every unitarily
/// invariant norm: the orthogonal polar factor of `YᵀX`.
pub fn align_rotation(x: &OrthonormalBasis, y: &OrthonormalBasis) -> Result<RotationAlignment> {
    if x.n() != y.n() || x.k() != y.k() {
        return Err(Error::DimensionMismatch {
            expected: shape_str(x.n(), x.k()),
            got: shape_str(y.n(), y.k()),
        });
    }
    let q = orthogonal_polar_factor(&(y.matrix().transpose() * x.matrix()))?;
    let residuals = NormValues::of_matrix(&(x.matrix() - y.matrix() * &q));
    Ok(RotationAlignment { q, residuals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{haar_orthogonal, random_orthonormal, rng_for};
    use std::f64::consts::{FRAC_PI_2, SQRT_2};

    fn e(n: usize, i: usize) -> OrthonormalBasis {
        let mut m = DenseMatrix::zeros(n, 1);
        m[(i, 0)] = 1.0;
        OrthonormalBasis::new(m).unwrap()
    }

    #[test]
    fn same_subspace_has_zero_angles() {
        let mut rng = rng_for(1, 0);
        let x = random_orthonormal(8, 3, &mut rng);
        let y = x.rotate(&haar_orthogonal(3, &mut rng)).unwrap();
        let a = canonical_angles(&x, &y).unwrap();
        assert!(a.sines().iter().all(|&s| s < 1e-12), "{:?}", a.sines());
        for kind in NormKind::ALL {
            assert!(sin_theta_norm(&a, kind) < 1e-12);
        }
    }

    #[test]
    fn orthogonal_lines() {
        let a = canonical_angles(&e(2, 0), &e(2, 1)).unwrap();
        assert_eq!(a.k(), 1);
        assert!((a.sines()[0] - 1.0).abs() < 1e-15);
        assert!(a.cosines()[0].abs() < 1e-15);
        assert!((a.angles()[0] - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn sin_theta_norm_arithmetic() {
        let a = AngleSpectrum::from_parts(vec![0.8, 0.6], vec![0.6, 0.8]).unwrap();
        assert_eq!(sin_theta_norm(&a, NormKind::Spectral), 0.8);
        assert!((sin_theta_norm(&a, NormKind::Frobenius) - 1.0).abs() < 1e-15);
        assert!((sin_theta_norm(&a, NormKind::Trace) - 1.4).abs() < 1e-15);
        assert!((truncated_sin_theta_norm(&a, 1, NormKind::Trace).unwrap() - 0.8).abs() < 1e-15);
        for kind in NormKind::ALL {
            assert_eq!(
                truncated_sin_theta_norm(&a, 2, kind).unwrap(),
                sin_theta_norm(&a, kind)
            );
            assert_eq!(
                truncated_sin_theta_norm(&a, 7, kind).unwrap(),
                sin_theta_norm(&a, kind)
            );
        }
        assert!(truncated_sin_theta_norm(&a, 0, NormKind::Trace).is_err());
    }

    #[test]
    fn uniform_spectrum_truncation() {
        let a = AngleSpectrum::uniform(5, 1e-3).unwrap();
        let t = truncated_sin_theta_norm(&a, 3, NormKind::Trace).unwrap();
        assert!((t - 3e-3).abs() < 1e-18);
    }

    #[test]
    fn dimension_mismatch() {
        let mut rng = rng_for(2, 0);
        let x = random_orthonormal(6, 2, &mut rng);
        let y = random_orthonormal(6, 3, &mut rng);
        assert!(matches!(canonical_angles(&x, &y), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(align_rotation(&x, &y), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn more_columns_than_complement() {
        // k = 4 > n - k = 2: two angles are necessarily zero.
        let mut rng = rng_for(3, 0);
        let x = random_orthonormal(6, 4, &mut rng);
        let y = random_orthonormal(6, 4, &mut rng);
        let a = canonical_angles(&x, &y).unwrap();
        assert_eq!(a.sines()[0], 0.0);
        assert_eq!(a.sines()[1], 0.0);
        for i in 0..4 {
            let p = a.sines()[i].powi(2) + a.paired_cosine(i).powi(2);
            assert!((p - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn rotation_of_same_space_is_recovered() {
        let mut rng = rng_for(4, 0);
        let x = random_orthonormal(7, 3, &mut rng);
        let q0 = haar_orthogonal(3, &mut rng);
        let y = x.rotate(&q0).unwrap();
        let al = align_rotation(&x, &y).unwrap();
        assert!(al.residuals.frobenius < 1e-12);
        assert!((al.q - q0.transpose()).amax() < 1e-12);
    }

    #[test]
    fn perpendicular_lines_saturate_the_upper_bound() {
        let al = align_rotation(&e(2, 0), &e(2, 1)).unwrap();
        assert!((al.residuals.spectral - SQRT_2).abs() < 1e-15);
        assert!((al.q[(0, 0)].abs() - 1.0).abs() < 1e-15);
    }
}
