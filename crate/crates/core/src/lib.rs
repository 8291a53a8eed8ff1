//! Reconstruction of functions on the unit ball from Radon projections by
//! orthogonal polynomial expansion (OPED), and the singular value
//! decomposition of the Radon transform in the same orthogonal bases.
//!
//! Module map:
//!
//! - [`specfun`]: Gegenbauer, Chebyshev and Jacobi polynomials, ball
//!   constants, Gauss rules.
//! - [`geometry`]: spherical cubatures and orthogonal frames.
//! - [`phantom`]: ellipse/ellipsoid phantoms, polynomial test objects and
//!   image grids.
//! - [`radon`]: numeric Radon oracle, sinograms and their container format.
//! - [`oped`]: the reconstruction kernels and operators.
//! - [`svd`]: singular functions, singular values and truncated-SVD
//!   reconstruction.

pub mod error;
pub mod geometry;
pub mod oped;
pub mod phantom;
pub mod radon;
pub mod specfun;
pub mod svd;
pub mod sum;

pub use error::{Error, Result};

/// Euclidean inner product of two equal-length slices.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
