//! Direction sets and cubature rules on `S^1` and `S^2`, and orthogonal
//! frames used to parameterize hyperplanes.
//!
//! Cubature weights are normalized against `sigma_d^{-1} \int_{S^{d-1}}`, so
//! they sum to one. A rule flagged `even_only` is exact only for even
//! polynomials up to `degree` (the "symmetric" rules used by the
//! reconstruction formulas); otherwise it is exact for every polynomial up to
//! `degree`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::gauss_legendre_rule;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphericalCubature {
    #[serde(rename = "d")]
    pub dimension: usize,
    pub degree: usize,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    #[serde(default)]
    pub even_only: bool,
}

impl SphericalCubature {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate<F: FnMut(&[f64]) -> f64>(&self, mut f: F) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, &w)| w * f(p))
            .sum()
    }

    /// Checks the structural invariants of a user-supplied rule.
    pub fn validate(&self) -> Result<()> {
        if self.dimension < 2 {
            return Err(Error::invalid("cubature dimension must be >= 2"));
        }
        if self.points.len() != self.weights.len() || self.points.is_empty() {
            return Err(Error::Format("cubature points/weights length mismatch".into()));
        }
        for p in &self.points {
            if p.len() != self.dimension {
                return Err(Error::Format("cubature point has wrong dimension".into()));
            }
            let norm = crate::dot(p, p).sqrt();
            if (norm - 1.0).abs() > 1e-12 {
                return Err(Error::Format(format!("cubature point not on the sphere: {p:?}")));
            }
        }
        if self.weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::Format("cubature weights must be positive".into()));
        }
        if (self.weights.iter().sum::<f64>() - 1.0).abs() > 1e-10 {
            return Err(Error::Format("cubature weights must sum to one".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let rule: Self = serde_json::from_str(s)?;
        rule.validate()?;
        Ok(rule)
    }
}

fn circle_rule(count: usize, step: f64, degree: usize, even_only: bool) -> SphericalCubature {
    let points = (0..count)
        .map(|nu| {
            let phi = nu as f64 * step;
            vec![phi.cos(), phi.sin()]
        })
        .collect();
    SphericalCubature {
        dimension: 2,
        degree,
        points,
        weights: vec![1.0 / count as f64; count],
        even_only,
    }
}

/// `2m+1` equally spaced directions `phi_nu = 2 nu pi / (2m+1)` on the full
/// circle; a symmetric rule of degree `4m`.
pub fn circle_directions(m: usize) -> SphericalCubature {
    let count = 2 * m + 1;
    circle_rule(count, 2.0 * PI / count as f64, 4 * m, true)
}

/// `n+1` directions `theta_nu = nu pi / (n+1)` on the half circle; a
/// symmetric rule of degree `2n`.
pub fn half_circle_directions(n: usize) -> SphericalCubature {
    circle_rule(n + 1, PI / (n as f64 + 1.0), 2 * n, true)
}

/// Product rule on `S^2` with `(n+1)^2` points: Gauss-Legendre in
/// `cos(theta)` and `n+1` azimuths `nu pi / (n+1)` on a half circle.
/// Symmetric, degree `2n`.
pub fn sphere_product_cubature(n: usize) -> Result<SphericalCubature> {
    let legendre = gauss_legendre_rule(n + 1)?;
    let count = n + 1;
    let mut points = Vec::with_capacity(count * count);
    let mut weights = Vec::with_capacity(count * count);
    for (&z, &lam) in legendre.nodes.iter().zip(&legendre.weights) {
        let s = (1.0 - z * z).sqrt();
        for nu in 0..count {
            let az = nu as f64 * PI / count as f64;
            points.push(vec![az.sin() * s, az.cos() * s, z]);
            weights.push(lam / count as f64);
        }
    }
    Ok(SphericalCubature {
        dimension: 3,
        degree: 2 * n,
        points,
        weights,
        even_only: true,
    })
}

/// A rule exact for *all* polynomials of total degree `<= degree` on
/// `S^{d-1}`, `d` in {2, 3}. Used for inner products of non-even functions.
pub fn sphere_full_cubature(d: usize, degree: usize) -> Result<SphericalCubature> {
    match d {
        2 => {
            let count = degree + 1;
            Ok(circle_rule(count, 2.0 * PI / count as f64, degree, false))
        }
        3 => {
            let polar = gauss_legendre_rule(degree / 2 + 1)?;
            let count = degree + 1;
            let mut points = Vec::new();
            let mut weights = Vec::new();
            for (&z, &lam) in polar.nodes.iter().zip(&polar.weights) {
                let s = (1.0 - z * z).sqrt();
                for nu in 0..count {
                    let az = 2.0 * PI * nu as f64 / count as f64;
                    points.push(vec![az.cos() * s, az.sin() * s, z]);
                    weights.push(lam / count as f64);
                }
            }
            Ok(SphericalCubature {
                dimension: 3,
                degree,
                points,
                weights,
                even_only: false,
            })
        }
        _ => Err(Error::invalid(format!(
            "built-in cubatures exist only for d = 2, 3 (got {d})"
        ))),
    }
}

/// Orthogonal `d x d` matrix whose first row is the direction `xi`. Rows
/// `2..d` span the hyperplane orthogonal to `xi`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalFrame {
    pub direction: Vec<f64>,
    /// Row-major.
    pub matrix: Vec<Vec<f64>>,
}

impl OrthogonalFrame {
    /// `(t, y) Q_xi = t xi + sum_i y_i row_{i+1}`.
    pub fn point(&self, t: f64, y: &[f64], out: &mut [f64]) {
        let d = self.direction.len();
        for (c, o) in out.iter_mut().enumerate().take(d) {
            let mut v = t * self.matrix[0][c];
            for (i, &yi) in y.iter().enumerate() {
                v += yi * self.matrix[i + 1][c];
            }
            *o = v;
        }
    }
}

/// Completes `xi` to an orthogonal frame with a Householder reflection
/// taking `e_1` to `xi`. The reflection vector is `e_1 - xi` when
/// `xi_1 < 0` and `e_1 + xi` otherwise (followed by negating the first row),
/// whichever is longer.
pub fn orthogonal_frame(xi: &[f64]) -> Result<OrthogonalFrame> {
    let d = xi.len();
    let norm = crate::dot(xi, xi).sqrt();
    if d == 0 || !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::invalid("frame direction must be a non-zero vector"));
    }
    let xi: Vec<f64> = xi.iter().map(|v| v / norm).collect();
    let flip = xi[0] >= 0.0;
    let mut v = xi.clone();
    if flip {
        v[0] += 1.0;
    } else {
        v.iter_mut().for_each(|c| *c = -*c);
        v[0] += 1.0;
    }
    let vv = crate::dot(&v, &v);
    let mut matrix = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..d {
            let id = if i == j { 1.0 } else { 0.0 };
            matrix[i][j] = id - 2.0 * v[i] * v[j] / vv;
        }
    }
    if flip {
        matrix[0].iter_mut().for_each(|c| *c = -*c);
    }
    // the first row is xi up to rounding; store it exactly
    matrix[0].copy_from_slice(&xi);
    Ok(OrthogonalFrame {
        direction: xi,
        matrix,
    })
}
