//! D-aligned orthonormal bases of subspaces and explicit bounds on how far
//! two such bases can differ in terms of the canonical angles between their
//! subspaces.
//!
//! The crate is organised bottom-up:
//!
//! - [`kernels`]: dense SVD with explicit rank decisions, orthonormal bases,
//!   Hadamard matrices, the plain-text matrix format.
//! - [`subspace`]: canonical angles, sin-Θ norms, rotation alignment.
//! - [`polar`]: canonical polar decomposition and the set of D-aligned bases.
//! - [`bounds`]: η and ξ constants, Wedin-type and polar-factor bounds,
//!   measured-versus-bound reports.
//! - [`experiments`]: reproducible δ-sweeps with CSV and SVG output.

pub mod bounds;
pub mod error;
pub mod experiments;
pub mod kernels;
pub mod polar;
pub mod sampling;
pub mod subspace;

pub use bounds::{evaluate_instance, eta, xi, xi_sharpened, BoundReport};
pub use error::{Error, Result};
pub use kernels::{DenseMatrix, NormKind, OrthonormalBasis, RankPolicy};
pub use polar::{align, polar, AlignedBasisSet, CanonicalPolar};
pub use subspace::{align_rotation, canonical_angles, sin_theta_norm, AngleSpectrum};
