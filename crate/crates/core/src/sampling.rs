//! Seeded random matrices.
//!
//! Every generator draws from a `ChaCha8Rng` seeded with a 64-bit seed and
//! switched to an explicit 64-bit stream, so independent consumers of the same
//! seed (sweep points, the two rotations of a test pair) never share draws and
//! results do not depend on evaluation order.

use nalgebra::linalg::QR;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::kernels::{DenseMatrix, OrthonormalBasis};

pub type SeededRng = ChaCha8Rng;

pub fn rng_for(seed: u64, stream: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DenseMatrix {
    // Column-major fill keeps the draw order fixed.
    let data: Vec<f64> = (0..rows * cols).map(|_| rng.sample(StandardNormal)).collect();
    DenseMatrix::from_vec(rows, cols, data)
}

/// Q factor of a Gaussian `rows x cols` matrix with the signs of R's diagonal
/// absorbed, which makes it Haar distributed.
fn haar_columns<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DenseMatrix {
    let g = gaussian_matrix(rows, cols, rng);
    let qr = QR::new(g);
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..cols {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Haar-random k x k orthogonal matrix.
pub fn haar_orthogonal<R: Rng + ?Sized>(k: usize, rng: &mut R) -> DenseMatrix {
    haar_columns(k, k, rng)
}

/// Uniformly random point on the Stiefel manifold O^{n x k}.
pub fn random_orthonormal<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> OrthonormalBasis {
    OrthonormalBasis::new(haar_columns(n, k, rng)).expect("Householder Q is orthonormal")
}
