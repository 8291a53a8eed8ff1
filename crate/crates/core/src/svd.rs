//! Singular value decomposition of the Radon transform.
//!
//! Inner products are normalized: `<f, g>_B = b_d^{-1} \int_{B^d} f g dx`
//! on the ball, and on the cylinder `Z = S^{d-1} x [-1, 1]`
//!
//! ```text
//! <f, g>_Z = c_{d/2} \int_{-1}^{1} sigma_d^{-1} \int_{S^{d-1}} f g domega (1 - t^2)^{(1-d)/2} dt.
//! ```
//!
//! Real spherical harmonics are indexed by `j = 1..=dim H_m^d`. For `d = 2`:
//! `j = 1` is `sqrt(2) cos(m theta)` and `j = 2` is `sqrt(2) sin(m theta)`
//! (only `j = 1`, the constant, when `m = 0`). For `d = 3`: `j = 1` is the
//! zonal harmonic, `j = 2i` the `cos(i phi)` and `j = 2i + 1` the
//! `sin(i phi)` harmonic of order `i`, with the polar angle measured from
//! the `x3` axis and no Condon-Shortley phase.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{sphere_full_cubature, SphericalCubature};
use crate::phantom::ImageGrid;
use crate::radon::{RadonSource, Sinogram};
use crate::specfun::{
    ball_volume, gauss_gegenbauer_rule, gauss_legendre_rule, gegenbauer_at_one, gegenbauer_fill,
    gegenbauer_norm, gegenbauer_normalizer, jacobi_norm, jacobi_unchecked,
};

fn binomial(n: i64, k: i64) -> usize {
    if k < 0 || n < k || n < 0 {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) as usize / (i + 1) as usize)
}

/// `dim H_m^d = C(m+d-1, d-1) - C(m+d-3, d-1)`.
pub fn dim_harmonics(d: usize, m: usize) -> usize {
    let (d, m) = (d as i64, m as i64);
    binomial(m + d - 1, d - 1) - binomial(m + d - 3, d - 1)
}

/// `dim V_n^d = C(n+d-1, n)`.
pub fn dim_orthogonal(d: usize, n: usize) -> usize {
    binomial((n + d - 1) as i64, n as i64)
}

fn check_harmonic(d: usize, m: usize, j: usize) -> Result<()> {
    if !(d == 2 || d == 3) {
        return Err(Error::invalid(format!("harmonics are implemented for d = 2, 3 (got {d})")));
    }
    if j == 0 || j > dim_harmonics(d, m) {
        return Err(Error::invalid(format!(
            "harmonic index j = {j} out of range 1..={} for degree {m}",
            dim_harmonics(d, m)
        )));
    }
    Ok(())
}

/// `(Re, Im)` of `(a + i b)^m`.
fn complex_power(a: f64, b: f64, m: usize) -> (f64, f64) {
    let (mut re, mut im) = (1.0, 0.0);
    for _ in 0..m {
        let r = re * a - im * b;
        im = re * b + im * a;
        re = r;
    }
    (re, im)
}

/// Degree-`m` solid harmonic `|x|^m Y_{j,m}(x / |x|)`, a homogeneous
/// polynomial, orthonormal on the sphere against `sigma_d^{-1} domega`.
/// No range checks.
fn solid_unchecked(d: usize, m: usize, j: usize, x: &[f64]) -> f64 {
    if m == 0 {
        return 1.0;
    }
    let sqrt2 = std::f64::consts::SQRT_2;
    if d == 2 {
        let (re, im) = complex_power(x[0], x[1], m);
        return sqrt2 * if j == 1 { re } else { im };
    }
    let order = j / 2;
    let (re, im) = complex_power(x[0], x[1], order);
    let z = x[2];
    let r2 = crate::dot(x, x);
    // Q_l^order(z, r^2) from l = order up to m
    let mut prev = 0.0;
    let mut cur = (1..=order).fold(1.0, |acc, i| acc * (2 * i - 1) as f64);
    for l in order..m {
        let next = ((2 * l + 1) as f64 * z * cur - (l + order) as f64 * r2 * prev) / (l - order + 1) as f64;
        prev = cur;
        cur = next;
    }
    // (2l+1) (l-order)! / (l+order)!
    let ratio = (m - order + 1..=m + order).fold((2 * m + 1) as f64, |acc, i| acc / i as f64);
    let mut norm = ratio.sqrt();
    if order > 0 {
        norm *= sqrt2;
    }
    let angular = if order == 0 || j.is_multiple_of(2) { re } else { im };
    norm * cur * angular
}

/// Real orthonormal spherical harmonic `Y_{j,m}(xi)`.
pub fn spherical_harmonic(d: usize, m: usize, j: usize, xi: &[f64]) -> Result<f64> {
    check_harmonic(d, m, j)?;
    if xi.len() != d {
        return Err(Error::GeometryMismatch(format!("point {xi:?} is not {d}-dimensional")));
    }
    Ok(solid_unchecked(d, m, j, xi))
}

/// Solid harmonic `|x|^m Y_{j,m}(x/|x|)` at any `x`.
pub fn solid_harmonic(d: usize, m: usize, j: usize, x: &[f64]) -> Result<f64> {
    spherical_harmonic(d, m, j, x)
}

/// `(n, k, j)` with `0 <= 2k <= n` and `1 <= j <= dim H_{n-2k}^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisIndex {
    pub n: usize,
    pub k: usize,
    pub j: usize,
}

impl BasisIndex {
    pub fn new(d: usize, n: usize, k: usize, j: usize) -> Result<Self> {
        if 2 * k > n {
            return Err(Error::invalid(format!("need 2k <= n, got n = {n}, k = {k}")));
        }
        check_harmonic(d, n - 2 * k, j)?;
        Ok(Self { n, k, j })
    }

    /// Degree of the harmonic factor, `n - 2k`.
    pub fn harmonic_degree(&self) -> usize {
        self.n - 2 * self.k
    }

    /// All indices of degree `n`, in `(k, j)` order.
    pub fn of_degree(d: usize, n: usize) -> Vec<BasisIndex> {
        (0..=n / 2)
            .flat_map(|k| (1..=dim_harmonics(d, n - 2 * k)).map(move |j| BasisIndex { n, k, j }))
            .collect()
    }

    /// All indices with degree `<= max_n`.
    pub fn up_to(d: usize, max_n: usize) -> Vec<BasisIndex> {
        (0..=max_n).flat_map(|n| Self::of_degree(d, n)).collect()
    }
}

fn check_dimension(d: usize, x: &[f64]) -> Result<()> {
    if !(d == 2 || d == 3) {
        return Err(Error::invalid(format!("the basis is implemented for d = 2, 3 (got {d})")));
    }
    if x.len() != d {
        return Err(Error::GeometryMismatch(format!("point {x:?} is not {d}-dimensional")));
    }
    Ok(())
}

fn ball_unchecked(d: usize, index: BasisIndex, x: &[f64]) -> f64 {
    let m = index.harmonic_degree();
    let half = d as f64 / 2.0;
    let beta = m as f64 + (d as f64 - 2.0) / 2.0;
    let radial = jacobi_unchecked(0.0, beta, index.k, 2.0 * crate::dot(x, x) - 1.0)
        / jacobi_norm(0.0, beta, index.k).sqrt();
    ((m as f64 + half) / half).sqrt() * radial * solid_unchecked(d, m, index.j, x)
}

/// Orthonormal ball polynomial
/// `f_{k,j}^n(x) = [h_{n,k}]^{-1} p_k^{(0, n-2k+(d-2)/2)}(2|x|^2 - 1) Y_{j,n-2k}(x)`
/// with `[h_{n,k}]^{-1} = sqrt((n-2k+d/2)/(d/2))`.
pub fn ball_basis(d: usize, index: BasisIndex, x: &[f64]) -> Result<f64> {
    check_dimension(d, x)?;
    BasisIndex::new(d, index.n, index.k, index.j)?;
    Ok(ball_unchecked(d, index, x))
}

/// Orthonormal cylinder function
/// `g_{k,j}^n(xi, t) = [h_n^{(d/2)}]^{-1/2} (1-t^2)^{(d-1)/2} C_n^{d/2}(t) Y_{j,n-2k}(xi)`.
pub fn cylinder_basis(d: usize, index: BasisIndex, xi: &[f64], t: f64) -> Result<f64> {
    check_dimension(d, xi)?;
    BasisIndex::new(d, index.n, index.k, index.j)?;
    if t.abs() > 1.0 {
        return Err(Error::invalid(format!("offset {t} outside [-1, 1]")));
    }
    let lambda = d as f64 / 2.0;
    let mut c = vec![0.0; index.n + 1];
    gegenbauer_fill(lambda, t, &mut c);
    let rho = (1.0 - t * t).powf((d as f64 - 1.0) / 2.0);
    Ok(rho * c[index.n] / gegenbauer_norm(lambda, index.n).sqrt()
        * solid_unchecked(d, index.harmonic_degree(), index.j, xi))
}

/// `gamma_n = b_{d-1} sqrt(n! / (d)_n)`.
pub fn singular_value(d: usize, n: usize) -> f64 {
    let ratio = (0..n).fold(1.0, |acc, i| acc * (i as f64 + 1.0) / (d as f64 + i as f64));
    ball_volume(d - 1) * ratio.sqrt()
}

/// Closed-form Radon transform of `P` in `V_n^d`:
/// `b_{d-1} (1-t^2)^{(d-1)/2} C_n^{d/2}(t) / C_n^{d/2}(1) P(xi)`, given the
/// value `P(xi)` on the sphere.
pub fn radon_of_orthogonal_polynomial(d: usize, n: usize, p_at_xi: f64, t: f64) -> f64 {
    if t.abs() >= 1.0 {
        return 0.0;
    }
    let lambda = d as f64 / 2.0;
    let mut c = vec![0.0; n + 1];
    gegenbauer_fill(lambda, t, &mut c);
    ball_volume(d - 1) * (1.0 - t * t).powf((d as f64 - 1.0) / 2.0) * c[n]
        / gegenbauer_at_one(lambda, n)
        * p_at_xi
}

/// A rule for `b_d^{-1} \int_{B^d}`, exact on polynomials of the stated
/// degree: Gauss-Legendre in the radius times a full spherical cubature.
#[derive(Debug, Clone, PartialEq)]
pub struct BallQuadrature {
    pub dimension: usize,
    pub degree: usize,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl BallQuadrature {
    pub fn new(d: usize, degree: usize) -> Result<Self> {
        let sphere = sphere_full_cubature(d, degree)?;
        // r^{d-1} p(r) has degree degree + d - 1 on [0, 1]
        let radial = gauss_legendre_rule((degree + d) / 2 + 1)?;
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (&u, &w) in radial.nodes.iter().zip(&radial.weights) {
            let r = 0.5 * (u + 1.0);
            // b_d^{-1} \int_B = d \int_0^1 r^{d-1} (sigma^{-1} \int_S) dr, and the
            // normalized Legendre weight integrates against dr on [0, 1]
            let radial_weight = d as f64 * w * r.powi(d as i32 - 1);
            for (xi, &lam) in sphere.points.iter().zip(&sphere.weights) {
                points.push(xi.iter().map(|c| r * c).collect());
                weights.push(radial_weight * lam);
            }
        }
        Ok(Self {
            dimension: d,
            degree,
            points,
            weights,
        })
    }

    pub fn integrate<F: Fn(&[f64]) -> f64 + Sync>(&self, f: F) -> f64 {
        let values: Vec<f64> = self
            .points
            .par_iter()
            .zip(self.weights.par_iter())
            .map(|(x, w)| w * f(x))
            .collect();
        crate::sum::pairwise_sum(&values)
    }
}

/// Coefficients of `R f` in the cylinder basis: `gamma_n <f, f_{k,j}^n>_B`
/// for every index with `n <= max_n`, by ball quadrature.
pub fn svd_forward<F>(d: usize, f: F, max_n: usize, quadrature: &BallQuadrature) -> Result<Vec<(BasisIndex, f64)>>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if quadrature.dimension != d {
        return Err(Error::GeometryMismatch("ball quadrature dimension differs".into()));
    }
    let values: Vec<f64> = quadrature.points.par_iter().map(|x| f(x)).collect();
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            point: quadrature.points[i].clone(),
        });
    }
    Ok(BasisIndex::up_to(d, max_n)
        .into_par_iter()
        .map(|idx| {
            let terms: Vec<f64> = quadrature
                .points
                .iter()
                .zip(&quadrature.weights)
                .zip(&values)
                .map(|((x, w), v)| w * v * ball_unchecked(d, idx, x))
                .collect();
            (idx, singular_value(d, idx.n) * crate::sum::pairwise_sum(&terms))
        })
        .collect())
}

/// Evaluates `sum coefficient * g_{k,j}^n(xi, t)`.
pub fn cylinder_series(d: usize, coefficients: &[(BasisIndex, f64)], xi: &[f64], t: f64) -> Result<f64> {
    coefficients
        .iter()
        .map(|(idx, c)| Ok(c * cylinder_basis(d, *idx, xi, t)?))
        .sum()
}

/// Compact form of the degree-`<= max_n` part of `R f`:
/// `c_{d/2} rho(t) sum_n [h_n]^{-1} (\int_{B^d} f C_n(<x, xi>) dx) C_n(t)`.
pub fn compact_radon<F>(d: usize, f: F, max_n: usize, quadrature: &BallQuadrature, xi: &[f64], t: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    check_dimension(d, xi)?;
    let lambda = d as f64 / 2.0;
    let volume = ball_volume(d);
    let moments: Vec<f64> = (0..=max_n)
        .map(|n| {
            quadrature.integrate(|x| {
                let mut c = vec![0.0; n + 1];
                gegenbauer_fill(lambda, crate::dot(x, xi), &mut c);
                f(x) * c[n]
            }) * volume
        })
        .collect();
    let mut ct = vec![0.0; max_n + 1];
    gegenbauer_fill(lambda, t, &mut ct);
    let rho = (1.0 - t * t).powf((d as f64 - 1.0) / 2.0);
    let sum: f64 = (0..=max_n).map(|n| moments[n] * ct[n] / gegenbauer_norm(lambda, n)).sum();
    Ok(gegenbauer_normalizer(lambda) * rho * sum)
}

/// Backprojection form of the adjoint,
/// `R^* g(x) = b_{d-1} sigma_d^{-1} \int_S g(xi, <x, xi>) (1 - <x, xi>^2)^{-(d-1)/2} domega`,
/// with the sphere integral discretized by `cubature`.
pub fn adjoint<G>(d: usize, g: G, cubature: &SphericalCubature, x: &[f64]) -> Result<f64>
where
    G: Fn(&[f64], f64) -> f64,
{
    check_dimension(d, x)?;
    let alpha = (d as f64 - 1.0) / 2.0;
    let total: f64 = cubature
        .points
        .iter()
        .zip(&cubature.weights)
        .map(|(xi, lam)| {
            let u = crate::dot(x, xi);
            lam * g(xi, u) / (1.0 - u * u).powf(alpha)
        })
        .sum();
    Ok(ball_volume(d - 1) * total)
}

/// Compact form of the adjoint truncated at `max_n`,
/// `c_{d/2} b_{d-1} sum_n [h_n]^{-1} sigma_d^{-1} \int_S \int g(xi, t) C_n(t) dt C_n(<x, xi>) domega`.
/// The `t`-integral uses a Gauss rule for `rho` with `t_points` nodes
/// applied to `g / rho`.
pub fn adjoint_compact<G>(
    d: usize,
    g: G,
    max_n: usize,
    cubature: &SphericalCubature,
    t_points: usize,
    x: &[f64],
) -> Result<f64>
where
    G: Fn(&[f64], f64) -> f64,
{
    check_dimension(d, x)?;
    let lambda = d as f64 / 2.0;
    let alpha = (d as f64 - 1.0) / 2.0;
    let rule = gauss_gegenbauer_rule(alpha, t_points)?;
    let c_lambda = gegenbauer_normalizer(lambda);
    let mut cu = vec![0.0; max_n + 1];
    let mut ct = vec![0.0; max_n + 1];
    let mut total = 0.0;
    for (xi, lam) in cubature.points.iter().zip(&cubature.weights) {
        gegenbauer_fill(lambda, crate::dot(x, xi), &mut cu);
        let mut moments = vec![0.0; max_n + 1];
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            let profile = g(xi, t) / (1.0 - t * t).powf(alpha) / c_lambda;
            gegenbauer_fill(lambda, t, &mut ct);
            for (mo, c) in moments.iter_mut().zip(&ct) {
                *mo += w * profile * c;
            }
        }
        total += lam
            * (0..=max_n)
                .map(|n| moments[n] * cu[n] / gegenbauer_norm(lambda, n))
                .sum::<f64>();
    }
    Ok(c_lambda * ball_volume(d - 1) * total)
}

/// Truncated SVD `S_N^* f = sum_{m <= N} gamma_m^{-1} sum_{k,j} <g, g_{k,j}^m>_Z f_{k,j}^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSvd {
    pub dimension: usize,
    pub truncation: usize,
    /// `(index, gamma^{-1} <g, g_index>_Z)`.
    pub coefficients: Vec<(BasisIndex, f64)>,
    /// Non-fatal notes on the discretization, e.g. an offset rule below
    /// the degree needed for exact coefficients.
    pub warnings: Vec<String>,
}

impl TruncatedSvd {
    /// Coefficients from per-direction moments `M_m(xi_nu) = \int g(xi_nu, t) C_m(t) dt`:
    /// `<g, g_{k,j}^m>_Z = c_{d/2} h_m^{-1/2} sum_nu lambda_nu Y_{j,m-2k}(xi_nu) M_m(xi_nu)`.
    fn from_moments(
        d: usize,
        truncation: usize,
        cubature: &SphericalCubature,
        moments: &[Vec<f64>],
        warnings: Vec<String>,
    ) -> Self {
        let lambda = d as f64 / 2.0;
        let c_lambda = gegenbauer_normalizer(lambda);
        let coefficients = BasisIndex::up_to(d, truncation)
            .into_iter()
            .map(|idx| {
                let m = idx.n;
                let s: f64 = cubature
                    .points
                    .iter()
                    .zip(&cubature.weights)
                    .zip(moments)
                    .map(|((xi, lam), mo)| lam * solid_unchecked(d, idx.harmonic_degree(), idx.j, xi) * mo[m])
                    .sum();
                let inner = c_lambda * s / gegenbauer_norm(lambda, m).sqrt();
                (idx, inner / singular_value(d, m))
            })
            .collect();
        Self {
            dimension: d,
            truncation,
            coefficients,
            warnings,
        }
    }

    fn check_cubature(d: usize, truncation: usize, cubature: &SphericalCubature) -> Result<()> {
        if cubature.dimension != d {
            return Err(Error::GeometryMismatch("cubature dimension differs from the data".into()));
        }
        if cubature.degree < 2 * truncation {
            return Err(Error::InsufficientDegree {
                required: 2 * truncation,
                available: cubature.degree,
            });
        }
        Ok(())
    }

    /// Data `g = R f` supplied through exact profile moments.
    pub fn from_source(source: &dyn RadonSource, truncation: usize, cubature: &SphericalCubature) -> Result<Self> {
        let d = source.dimension();
        Self::check_cubature(d, truncation, cubature)?;
        let moments = cubature
            .points
            .par_iter()
            .map(|xi| source.gegenbauer_moments(xi, truncation))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_moments(d, truncation, cubature, &moments, Vec::new()))
    }

    /// Data from a sinogram, reusing its directions and offset rule. The
    /// direction cubature must reach degree `2N`; an offset rule below
    /// degree `2N` is reported in `warnings`.
    pub fn from_sinogram(sinogram: &Sinogram, truncation: usize) -> Result<Self> {
        let g = &sinogram.geometry;
        let d = g.dimension;
        Self::check_cubature(d, truncation, &g.directions)?;
        let mut warnings = Vec::new();
        if g.node_degree < 2 * truncation {
            warnings.push(format!(
                "offset rule is exact to degree {}, below the {} needed for exact coefficients",
                g.node_degree,
                2 * truncation
            ));
        }
        let lambda = d as f64 / 2.0;
        let alpha = (d as f64 - 1.0) / 2.0;
        let scale = ball_volume(d) / ball_volume(d - 1);
        let node_values: Vec<Vec<f64>> = g
            .nodes
            .iter()
            .map(|&t| {
                let mut c = vec![0.0; truncation + 1];
                gegenbauer_fill(lambda, t, &mut c);
                c
            })
            .collect();
        let moments: Vec<Vec<f64>> = (0..g.view_count())
            .map(|nu| {
                let row = sinogram.view(nu);
                (0..=truncation)
                    .map(|m| {
                        g.nodes
                            .iter()
                            .enumerate()
                            .map(|(j, &t)| {
                                scale * g.weights[j] * row[j] / (1.0 - t * t).powf(alpha) * node_values[j][m]
                            })
                            .sum()
                    })
                    .collect()
            })
            .collect();
        Ok(Self::from_moments(d, truncation, &g.directions, &moments, warnings))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let terms: Vec<f64> = self
            .coefficients
            .iter()
            .map(|(idx, c)| c * ball_unchecked(self.dimension, *idx, x))
            .collect();
        crate::sum::pairwise_sum(&terms)
    }

    pub fn grid(&self, resolution: usize) -> Result<ImageGrid> {
        ImageGrid::from_fn(self.dimension, resolution, |x| self.eval(x))
    }
}

/// Orthogonal projection sum `sum_{m <= n} sum_{k,j} <f, f_{k,j}^m>_B f_{k,j}^m`
/// with ball-quadrature coefficients.
pub fn projection_sum<F>(d: usize, f: F, n: usize, quadrature: &BallQuadrature) -> Result<TruncatedSvd>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let coefficients = svd_forward(d, f, n, quadrature)?
        .into_iter()
        .map(|(idx, c)| (idx, c / singular_value(d, idx.n)))
        .collect();
    Ok(TruncatedSvd {
        dimension: d,
        truncation: n,
        coefficients,
        warnings: Vec::new(),
    })
}

/// Reproducing kernel of `V_n^d` as a basis sum `sum_{k,j} f(x) f(y)`.
pub fn reproducing_kernel(d: usize, n: usize, x: &[f64], y: &[f64]) -> Result<f64> {
    check_dimension(d, x)?;
    check_dimension(d, y)?;
    Ok(BasisIndex::of_degree(d, n)
        .iter()
        .map(|&idx| ball_unchecked(d, idx, x) * ball_unchecked(d, idx, y))
        .sum())
}

/// The same kernel as `((n+d/2)/(d/2)) sigma^{-1} \int_S C_n(<x,xi>) C_n(<y,xi>) domega`,
/// with the sphere integral discretized by `cubature`.
pub fn reproducing_kernel_sphere(d: usize, n: usize, x: &[f64], y: &[f64], cubature: &SphericalCubature) -> Result<f64> {
    check_dimension(d, x)?;
    check_dimension(d, y)?;
    let lambda = d as f64 / 2.0;
    let mut cx = vec![0.0; n + 1];
    let mut cy = vec![0.0; n + 1];
    let s = cubature.integrate(|xi| {
        gegenbauer_fill(lambda, crate::dot(x, xi), &mut cx);
        gegenbauer_fill(lambda, crate::dot(y, xi), &mut cy);
        cx[n] * cy[n]
    });
    Ok((n as f64 + lambda) / lambda * s)
}

/// A singular triple `(gamma_n, f_{k,j}^n, g_{k,j}^n)` with
/// `R f_{k,j}^n = gamma_n g_{k,j}^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularTriple {
    pub dimension: usize,
    pub index: BasisIndex,
    pub gamma: f64,
}

impl SingularTriple {
    pub fn new(d: usize, index: BasisIndex) -> Result<Self> {
        BasisIndex::new(d, index.n, index.k, index.j)?;
        Ok(Self {
            dimension: d,
            index,
            gamma: singular_value(d, index.n),
        })
    }

    pub fn ball_side(&self, x: &[f64]) -> Result<f64> {
        ball_basis(self.dimension, self.index, x)
    }

    pub fn cylinder_side(&self, xi: &[f64], t: f64) -> Result<f64> {
        cylinder_basis(self.dimension, self.index, xi, t)
    }
}

/// `count` deterministic, roughly uniform directions: equally spaced angles
/// for `d = 2`, a Fibonacci spiral for `d = 3`.
pub fn lattice_directions(d: usize, count: usize) -> Vec<Vec<f64>> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            if d == 2 {
                let th = std::f64::consts::PI * (2.0 * i as f64 + 0.5) / count as f64;
                vec![th.cos(), th.sin()]
            } else {
                let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
                let r = (1.0 - z * z).sqrt();
                let phi = golden * i as f64;
                vec![r * phi.cos(), r * phi.sin(), z]
            }
        })
        .collect()
}

/// `max |R f_{k,j}^n(xi, t) - gamma_n g_{k,j}^n(xi, t)|` over all indices
/// with `n <= n_max` and a `size x size` lattice of directions and
/// offsets in `[-0.95, 0.95]`, with the transform computed numerically.
pub fn pair_residual(d: usize, n_max: usize, size: usize) -> Result<f64> {
    if !(d == 2 || d == 3) || size < 2 {
        return Err(Error::invalid("pair residual needs d = 2, 3 and a lattice of size >= 2"));
    }
    let dirs = lattice_directions(d, size);
    let offsets: Vec<f64> = (0..size).map(|i| -0.95 + 1.9 * i as f64 / (size - 1) as f64).collect();
    let jobs: Vec<(BasisIndex, usize, usize)> = BasisIndex::up_to(d, n_max)
        .into_iter()
        .flat_map(|idx| (0..size).flat_map(move |a| (0..size).map(move |b| (idx, a, b))))
        .collect();
    let residuals = jobs
        .par_iter()
        .map(|&(idx, a, b)| {
            let f = |x: &[f64]| ball_unchecked(d, idx, x);
            let numeric = crate::radon::radon_numeric(&f, &dirs[a], offsets[b], 1)?;
            let pair = singular_value(d, idx.n) * cylinder_basis(d, idx, &dirs[a], offsets[b])?;
            Ok((numeric - pair).abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(residuals.into_iter().fold(0.0, f64::max))
}

/// Least-squares ratio of `||R f||_{L^2(Z)}` to `||f||_{L^2(B^d)}` over the
/// given basis functions of degree `n`, with the transform computed
/// numerically and both norms by quadrature.
pub fn measured_singular_value(d: usize, n: usize, indices: &[BasisIndex]) -> Result<f64> {
    let lambda = d as f64 / 2.0;
    let alpha = (d as f64 - 1.0) / 2.0;
    let sphere = sphere_full_cubature(d, 2 * n)?;
    let rule = gauss_gegenbauer_rule(alpha, n + 1)?;
    let ball = BallQuadrature::new(d, 2 * n)?;
    let scale = gegenbauer_normalizer(lambda) * ball_volume(d) / ball_volume(d - 1);
    let pairs = indices
        .par_iter()
        .map(|&idx| {
            if idx.n != n {
                return Err(Error::invalid(format!("index {idx:?} is not of degree {n}")));
            }
            let f = |x: &[f64]| ball_unchecked(d, idx, x);
            let mut z = 0.0;
            for (xi, lam) in sphere.points.iter().zip(&sphere.weights) {
                for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
                    let profile = crate::radon::radon_numeric(&f, xi, t, 1)? / (1.0 - t * t).powf(alpha);
                    z += lam * w * profile * profile;
                }
            }
            Ok(((scale * z).sqrt(), ball.integrate(|x| f(x) * f(x)).sqrt()))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let num: f64 = pairs.iter().map(|(a, b)| a * b).sum();
    let den: f64 = pairs.iter().map(|(_, b)| b * b).sum();
    Ok(num / den)
}

fn gram_residual(size: usize, entry: impl Fn(usize, usize) -> f64 + Sync) -> f64 {
    (0..size)
        .into_par_iter()
        .map(|a| {
            (0..size)
                .map(|b| (entry(a, b) - if a == b { 1.0 } else { 0.0 }).abs())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// `max |G - I|` for the ball basis with `n <= n_max` under ball quadrature.
pub fn ball_gram_residual(d: usize, n_max: usize) -> Result<f64> {
    let q = BallQuadrature::new(d, 2 * n_max)?;
    let idx = BasisIndex::up_to(d, n_max);
    let values: Vec<Vec<f64>> = idx
        .iter()
        .map(|&i| q.points.iter().map(|x| ball_unchecked(d, i, x)).collect())
        .collect();
    Ok(gram_residual(idx.len(), |a, b| {
        let terms: Vec<f64> = q.weights.iter().enumerate().map(|(p, w)| w * values[a][p] * values[b][p]).collect();
        crate::sum::pairwise_sum(&terms)
    }))
}

/// `max |G - I|` for the cylinder basis with `n <= n_max` under the
/// `L^2(Z)` inner product, by a full sphere cubature and a Gauss rule for
/// `rho` applied to the polynomial part.
pub fn cylinder_gram_residual(d: usize, n_max: usize) -> Result<f64> {
    let alpha = (d as f64 - 1.0) / 2.0;
    let rule = gauss_gegenbauer_rule(alpha, n_max + 1)?;
    let sphere = sphere_full_cubature(d, 2 * n_max)?;
    let scale = gegenbauer_normalizer(d as f64 / 2.0) * ball_volume(d) / ball_volume(d - 1);
    let idx = BasisIndex::up_to(d, n_max);
    let mut weights = Vec::new();
    let mut values: Vec<Vec<f64>> = vec![Vec::new(); idx.len()];
    for (xi, lam) in sphere.points.iter().zip(&sphere.weights) {
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            weights.push(scale * lam * w);
            let rho = (1.0 - t * t).powf(alpha);
            for (v, &i) in values.iter_mut().zip(&idx) {
                v.push(cylinder_basis(d, i, xi, t)? / rho);
            }
        }
    }
    Ok(gram_residual(idx.len(), |a, b| {
        let terms: Vec<f64> = weights.iter().enumerate().map(|(p, w)| w * values[a][p] * values[b][p]).collect();
        crate::sum::pairwise_sum(&terms)
    }))
}

/// `max |G - I|` for the spherical harmonics of degree `<= m_max` under
/// `cubature`. Odd products are skipped when the cubature is even-only.
pub fn harmonic_gram_residual(d: usize, m_max: usize, cubature: &SphericalCubature) -> Result<f64> {
    let list: Vec<(usize, usize)> = (0..=m_max).flat_map(|m| (1..=dim_harmonics(d, m)).map(move |j| (m, j))).collect();
    for &(m, j) in &list {
        check_harmonic(d, m, j)?;
    }
    Ok(gram_residual(list.len(), |a, b| {
        let ((m1, j1), (m2, j2)) = (list[a], list[b]);
        if cubature.even_only && (m1 + m2) % 2 == 1 {
            return if a == b { 1.0 } else { 0.0 };
        }
        cubature.integrate(|xi| solid_unchecked(d, m1, j1, xi) * solid_unchecked(d, m2, j2, xi))
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramResiduals {
    pub ball: f64,
    pub cylinder: f64,
    pub harmonics: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaRow {
    pub n: usize,
    pub closed_form: f64,
    /// Fitted from numerically transformed basis functions, when measured.
    pub measured: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvdReport {
    pub d: usize,
    pub n_max: usize,
    pub lattice: usize,
    pub max_pair_residual: f64,
    pub gram_residuals: GramResiduals,
    pub gamma_table: Vec<GammaRow>,
}

/// Numerical checks of the decomposition up to degree `n_max`: the
/// singular-pair residual on a `lattice x lattice` grid, Gram residuals of
/// all three bases, and closed-form versus measured singular values
/// (measured from at most `gamma_samples` basis functions per degree).
pub fn verify(d: usize, n_max: usize, lattice: usize, gamma_samples: usize) -> Result<SvdReport> {
    let harmonics = harmonic_gram_residual(d, n_max, &sphere_full_cubature(d, 2 * n_max)?)?;
    let gamma_table = (0..=n_max)
        .map(|n| {
            let idx = BasisIndex::of_degree(d, n);
            let take = idx.len().min(gamma_samples);
            let measured = if take > 0 {
                Some(measured_singular_value(d, n, &idx[..take])?)
            } else {
                None
            };
            Ok(GammaRow {
                n,
                closed_form: singular_value(d, n),
                measured,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SvdReport {
        d,
        n_max,
        lattice,
        max_pair_residual: pair_residual(d, n_max, lattice)?,
        gram_residuals: GramResiduals {
            ball: ball_gram_residual(d, n_max)?,
            cylinder: cylinder_gram_residual(d, n_max)?,
            harmonics,
        },
        gamma_table,
    })
}
