use std::f64::consts::SQRT_2;

use proptest::prelude::*;

use orthoalign::bounds::analyze_instance;
use orthoalign::kernels::{singular_values, svd, truncated_norm, NormValues};
use orthoalign::polar::{align_with, check_aligned, hausdorff_distance_estimate, optimal_representative};
use orthoalign::sampling::{gaussian_matrix, haar_orthogonal, random_orthonormal, rng_for};
use orthoalign::subspace::truncated_sin_theta_norm;
use orthoalign::{align_rotation, canonical_angles, sin_theta_norm, DenseMatrix, NormKind, OrthonormalBasis, RankPolicy};

const POLICY: RankPolicy = RankPolicy::Relative(1e-10);

/// (n, k) with 1 <= k < n <= 24.
fn dims() -> impl Strategy<Value = (usize, usize)> {
    (2usize..=24).prop_flat_map(|n| (Just(n), 1..n))
}

fn nearby(x: &OrthonormalBasis, scale: f64, seed: u64) -> OrthonormalBasis {
    let e = gaussian_matrix(x.n(), x.k(), &mut rng_for(seed, 99)) * scale;
    OrthonormalBasis::from_span(&(x.matrix() + e)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn angles_are_symmetric((n, k) in dims(), seed in any::<u64>()) {
        let mut rng = rng_for(seed, 0);
        let x = random_orthonormal(n, k, &mut rng);
        let y = random_orthonormal(n, k, &mut rng);
        let a = canonical_angles(&x, &y).unwrap();
        let b = canonical_angles(&y, &x).unwrap();
        for kind in NormKind::ALL {
            prop_assert!((sin_theta_norm(&a, kind) - sin_theta_norm(&b, kind)).abs() < 1e-12);
        }
    }

    #[test]
    fn angles_ignore_basis_choice((n, k) in dims(), seed in any::<u64>()) {
        let mut rng = rng_for(seed, 0);
        let x = random_orthonormal(n, k, &mut rng);
        let y = random_orthonormal(n, k, &mut rng);
        let xr = x.rotate(&haar_orthogonal(k, &mut rng)).unwrap();
        let yr = y.rotate(&haar_orthogonal(k, &mut rng)).unwrap();
        let a = canonical_angles(&x, &y).unwrap();
        let b = canonical_angles(&xr, &yr).unwrap();
        for i in 0..k {
            prop_assert!((a.sines()[i] - b.sines()[i]).abs() < 1e-12);
            prop_assert!((a.cosines()[i] - b.cosines()[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn sines_and_cosines_pair((n, k) in dims(), seed in any::<u64>()) {
        let mut rng = rng_for(seed, 0);
        let x = random_orthonormal(n, k, &mut rng);
        let y = random_orthonormal(n, k, &mut rng);
        let a = canonical_angles(&x, &y).unwrap();
        for i in 0..k {
            let s = a.sines()[i];
            let c = a.paired_cosine(i);
            prop_assert!((s * s + c * c - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sin_theta_triangle_inequality((n, k) in dims(), seed in any::<u64>()) {
        let mut rng = rng_for(seed, 0);
        let x = random_orthonormal(n, k, &mut rng);
        let y = random_orthonormal(n, k, &mut rng);
        let z = random_orthonormal(n, k, &mut rng);
        let d = |a: &OrthonormalBasis, b: &OrthonormalBasis, kind| {
            sin_theta_norm(&canonical_angles(a, b).unwrap(), kind)
        };
        for kind in NormKind::ALL {
            prop_assert!(d(&x, &z, kind) <= d(&x, &y, kind) + d(&y, &z, kind) + 1e-12);
        }
    }

    #[test]
    fn rotation_alignment_sandwich((n, k) in dims(), seed in any::<u64>(), scale in -8.0f64..0.0) {
        let mut rng = rng_for(seed, 0);
        let x = random_orthonormal(n, k, &mut rng);
        let y = nearby(&x, 10f64.powf(scale), seed);
        let a = canonical_angles(&x, &y).unwrap();
        let al = align_rotation(&x, &y).unwrap();
        for kind in NormKind::ALL {
            let s = sin_theta_norm(&a, kind);
            let e = al.residuals.get(kind);
            prop_assert!(s <= e + 1e-12, "{kind}: {s} > {e}");
            prop_assert!(e <= SQRT_2 * s + 1e-12, "{kind}: {e} > sqrt2 * {s}");
        }
    }

    #[test]
    fn svd_reconstructs(rows in 1usize..12, cols in 1usize..12, rank in 1usize..12, seed in any::<u64>()) {
        let mut rng = rng_for(seed, 0);
        let rank = rank.min(rows).min(cols);
        let b = gaussian_matrix(rows, rank, &mut rng) * gaussian_matrix(rank, cols, &mut rng);
        let f = svd(&b, RankPolicy::Default).unwrap();
        let s1 = f.sigma[0];
        prop_assert!((f.reconstruct() - &b).norm() <= 1e-12 * s1.max(1.0) * (rows * cols) as f64);
        prop_assert!((f.u.transpose() * &f.u - DenseMatrix::identity(rows, rows)).amax() < 1e-12);
        prop_assert!((f.v.transpose() * &f.v - DenseMatrix::identity(cols, cols)).amax() < 1e-12);
        prop_assert!(f.sigma.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn truncated_norm_is_monotone(rows in 1usize..10, cols in 1usize..10, seed in any::<u64>()) {
        let b = gaussian_matrix(rows, cols, &mut rng_for(seed, 0));
        for kind in NormKind::ALL {
            let mut prev = 0.0;
            for r in 1..=rows.min(cols) + 1 {
                let t = truncated_norm(&b, r, kind).unwrap();
                prop_assert!(t >= prev);
                prev = t;
            }
            prop_assert!((prev - kind.of_matrix(&b)).abs() <= 1e-12 * prev.max(1.0));
        }
    }

    #[test]
    fn every_member_of_the_aligned_set_is_aligned(
        (n, k) in (3usize..=20).prop_flat_map(|n| (Just(n), 2..n.min(7))),
        seed in any::<u64>(),
        zeroed in 0usize..3,
    ) {
        let zeroed = zeroed.min(k - 1);
        let mut rng = rng_for(seed, 0);
        let mut d = gaussian_matrix(n, k, &mut rng);
        for j in k - zeroed..k {
            d.column_mut(j).fill(0.0);
        }
        let x = random_orthonormal(n, k, &mut rng);
        let (aligned, set) = align_with(&x, &d, POLICY).unwrap();
        prop_assert_eq!(set.r, k - zeroed);
        check_aligned(&aligned, &d).unwrap();
        let fd = set.freedom_dim();
        for _ in 0..4 {
            let w = haar_orthogonal(fd, &mut rng);
            let y = set.member(&w).unwrap();
            prop_assert!(check_aligned(&y, &d).is_ok());
            let a = canonical_angles(&x, &y).unwrap();
            prop_assert!(a.sines().iter().all(|&s| s < 1e-10));
        }
    }

    #[test]
    fn optimal_member_is_never_beaten(
        seed in any::<u64>(),
        scale in -6.0f64..-1.0,
    ) {
        let (n, k) = (12, 5);
        let mut rng = rng_for(seed, 0);
        let mut d = gaussian_matrix(n, k, &mut rng);
        d.column_mut(4).fill(0.0);
        d.column_mut(3).fill(0.0);
        d.column_mut(2).fill(0.0);
        let x = random_orthonormal(n, k, &mut rng);
        let (_, set) = align_with(&x, &d, POLICY).unwrap();
        let (xt, _) = align_with(&nearby(&x, 10f64.powf(scale), seed), &d, POLICY).unwrap();
        let (y_opt, _) = optimal_representative(&set, &xt).unwrap();
        let best = (xt.matrix() - y_opt.matrix()).norm();
        for _ in 0..64 {
            let y = set.member(&haar_orthogonal(3, &mut rng)).unwrap();
            prop_assert!((xt.matrix() - y.matrix()).norm() >= best - 1e-12);
        }
    }

    #[test]
    fn hausdorff_distance_is_bounded_by_xi(
        seed in any::<u64>(),
        scale in -7.0f64..-1.0,
        zeroed in 0usize..3,
    ) {
        let (n, k) = (14, 4);
        let mut rng = rng_for(seed, 0);
        let mut d = gaussian_matrix(n, k, &mut rng);
        for j in k - zeroed..k {
            d.column_mut(j).fill(0.0);
        }
        let x = random_orthonormal(n, k, &mut rng);
        let (xa, set) = align_with(&x, &d, POLICY).unwrap();
        let (xt, set_t) = align_with(&nearby(&x, 10f64.powf(scale), seed), &d, POLICY).unwrap();
        let analysis = analyze_instance(&xa, &xt, &d, POLICY).unwrap();
        for kind in NormKind::ALL {
            let rep = analysis.report(kind).unwrap();
            let h = hausdorff_distance_estimate(&set, &set_t, kind, 32, seed).unwrap();
            prop_assert!(h.value <= rep.xi + 1e-12, "{kind}: {} > {}", h.value, rep.xi);
            if let Some(s) = rep.xi_sharpened {
                prop_assert!(s <= rep.xi);
            }
            prop_assert!(rep.eta > SQRT_2);
            let t = truncated_sin_theta_norm(&analysis.angles, rep.r, kind).unwrap();
            prop_assert!(t <= rep.sin_theta + 1e-15);
        }
    }

    #[test]
    fn norm_values_agree_with_norm_kind(rows in 1usize..9, cols in 1usize..9, seed in any::<u64>()) {
        let b = gaussian_matrix(rows, cols, &mut rng_for(seed, 0));
        let nv = NormValues::of_matrix(&b);
        let sv = singular_values(&b);
        for kind in NormKind::ALL {
            prop_assert!((nv.get(kind) - kind.of_values(&sv)).abs() < 1e-12 * nv.trace.max(1.0));
            prop_assert!((nv.get(kind) - kind.of_matrix(&b)).abs() < 1e-12 * nv.trace.max(1.0));
        }
        prop_assert!(nv.spectral <= nv.frobenius + 1e-12 && nv.frobenius <= nv.trace + 1e-12);
    }
}
