//! Reconstruction operators.
//!
//! Every operator here evaluates a finite sum over directions of
//! one-dimensional Gegenbauer series,
//!
//! ```text
//! F(x) = sum_nu sum_{k=0}^{K} F_nu[k] C_k^{d/2}(<x, xi_nu>),
//! ```
//!
//! and differs only in how the coefficients `F_nu[k]` are obtained:
//!
//! - discrete OPED from a sinogram with effective offset weights `w_j`:
//!   `F_nu[k] = lambda_nu eta_k (k+d/2)/(d/2) sum_j w_j R_{nu j} C_k(t_j) / (b_{d-1} rho(t_j))`;
//! - the semi-discrete partial sum from exact profile moments:
//!   `F_nu[k] = lambda_nu eta_k (k+d/2)/(d/2) b_d^{-1} \int R f(xi_nu, t) C_k(t) dt`.
//!
//! For the planar type II scan this is the familiar
//! `sum_nu sum_j R f(xi_nu, cos theta_j) T_{j,nu}(x)` with
//! `T_{j,nu}(x) = (2m+1)^{-2} sum_k (k+1) sin((k+1) theta_j) U_k(<x, xi_nu>)`.
//! For type I the effective weights `(2/(2m+1)) sin^2 psi_j` fold the
//! factor `1 - t^2` into the first-kind Chebyshev rule, which yields the
//! same kernel with `theta_j` replaced by `psi_j`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::SphericalCubature;
use crate::phantom::ImageGrid;
use crate::radon::{RadonSource, ScanGeometry, ScanType, Sinogram};
use crate::specfun::{ball_volume, gegenbauer_fill};
use crate::sum::SummationMode;

/// Smooth cut-off: `1` on `[0, 1]`, `0` on `[2, inf)`, and
/// `g(2 - t) / (g(2 - t) + g(t - 1))` with `g(s) = exp(-1/s)` in between.
pub fn eta(t: f64) -> f64 {
    let t = t.abs();
    if t <= 1.0 {
        return 1.0;
    }
    if t >= 2.0 {
        return 0.0;
    }
    let g = |s: f64| (-1.0 / s).exp();
    let (a, b) = (g(2.0 - t), g(t - 1.0));
    a / (a + b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Filter {
    #[default]
    None,
    Eta,
}

/// `Phi_n(t, u) = sum_k eta_k (k+d/2)/(d/2) C_k^{d/2}(t) C_k^{d/2}(u)`,
/// with `eta_k = 1` and `K = n` when `filter` is `None`. The filtered
/// kernel runs to `K = 2n` with `eta_k = eta(k/n)`.
pub fn phi_kernel(d: usize, n: usize, t: f64, u: f64, filter: Filter) -> f64 {
    let factors = kernel_factors(d, n, filter);
    let lambda = d as f64 / 2.0;
    let mut ct = vec![0.0; factors.len()];
    let mut cu = vec![0.0; factors.len()];
    gegenbauer_fill(lambda, t, &mut ct);
    gegenbauer_fill(lambda, u, &mut cu);
    factors.iter().zip(ct.iter().zip(&cu)).map(|(f, (a, b))| f * (a * b)).sum()
}

/// `eta_k (k + d/2) / (d/2)` for `k = 0..=K`.
fn kernel_factors(d: usize, n: usize, filter: Filter) -> Vec<f64> {
    let lambda = d as f64 / 2.0;
    filter_weights(n, filter)
        .into_iter()
        .enumerate()
        .map(|(k, e)| e * (k as f64 + lambda) / lambda)
        .collect()
}

fn filter_weights(n: usize, filter: Filter) -> Vec<f64> {
    match filter {
        Filter::None => vec![1.0; n + 1],
        Filter::Eta if n == 0 => vec![1.0],
        Filter::Eta => (0..=2 * n).map(|k| eta(k as f64 / n as f64)).collect(),
    }
}

/// Kernel coefficients and their Gegenbauer values at a fixed set of
/// offsets.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    pub dimension: usize,
    pub order: usize,
    pub filter: Filter,
    /// `eta_k`, `k = 0..=K`.
    pub eta: Vec<f64>,
    /// `eta_k (k+d/2)/(d/2)`.
    pub factors: Vec<f64>,
    /// `node_values[j][k] = C_k^{d/2}(t_j)`.
    pub node_values: Vec<Vec<f64>>,
}

impl KernelTable {
    pub fn new(d: usize, order: usize, filter: Filter, nodes: &[f64]) -> Result<Self> {
        if d < 2 {
            return Err(Error::invalid(format!("dimension must be >= 2, got {d}")));
        }
        let eta = filter_weights(order, filter);
        let factors = kernel_factors(d, order, filter);
        let lambda = d as f64 / 2.0;
        let node_values = nodes
            .iter()
            .map(|&t| {
                let mut c = vec![0.0; eta.len()];
                gegenbauer_fill(lambda, t, &mut c);
                c
            })
            .collect();
        Ok(Self {
            dimension: d,
            order,
            filter,
            eta,
            factors,
            node_values,
        })
    }

    /// Highest Gegenbauer degree in the kernel.
    pub fn max_degree(&self) -> usize {
        self.factors.len() - 1
    }

    /// `Phi(t_j, u)` for every cached node.
    pub fn phi_at_nodes(&self, u: f64, out: &mut [f64]) {
        let mut cu = vec![0.0; self.factors.len()];
        gegenbauer_fill(self.dimension as f64 / 2.0, u, &mut cu);
        for (o, ct) in out.iter_mut().zip(&self.node_values) {
            *o = ct
                .iter()
                .zip(&cu)
                .zip(&self.factors)
                .map(|((a, b), f)| a * b * f)
                .sum();
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionConfig {
    /// `m` for the planar type I/II scans, `n` otherwise.
    pub order: usize,
    pub scan: ScanType,
    pub filter: Filter,
    pub resolution: usize,
    pub summation: SummationMode,
}

impl ReconstructionConfig {
    pub fn new(scan: ScanType, order: usize, resolution: usize) -> Self {
        Self {
            order,
            scan,
            filter: Filter::None,
            resolution,
            summation: SummationMode::default(),
        }
    }

    pub fn with_filter(mut self, filter: Filter) -> Self {
        self.filter = filter;
        self
    }

    pub fn with_summation(mut self, summation: SummationMode) -> Self {
        self.summation = summation;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.order < 1 {
            return Err(Error::invalid("reconstruction order must be >= 1"));
        }
        if self.resolution < 2 {
            return Err(Error::invalid("grid resolution must be >= 2"));
        }
        Ok(())
    }

    /// Checks that the sinogram was taken on the configured scan.
    pub fn check(&self, sinogram: &Sinogram) -> Result<()> {
        self.validate()?;
        let g = &sinogram.geometry;
        if g.scan != self.scan {
            return Err(Error::GeometryMismatch(format!(
                "sinogram scan is {}, configuration asks for {}",
                g.scan, self.scan
            )));
        }
        if g.m_or_n != self.order {
            return Err(Error::OrderMismatch {
                expected: self.order,
                found: g.m_or_n,
            });
        }
        Ok(())
    }
}

/// The per-view Gegenbauer series of a reconstruction. Evaluation is pure,
/// so grids are filled in parallel with results independent of the thread
/// count.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewExpansion {
    pub dimension: usize,
    pub directions: Vec<Vec<f64>>,
    /// `coeffs[nu][k]`.
    pub coeffs: Vec<Vec<f64>>,
    pub summation: SummationMode,
    /// Recurrence multipliers `2(k+lambda)/(k+1)` and `(k+2lambda-1)/(k+1)`.
    recurrence: Vec<(f64, f64)>,
}

impl ViewExpansion {
    pub fn new(
        dimension: usize,
        directions: Vec<Vec<f64>>,
        coeffs: Vec<Vec<f64>>,
        summation: SummationMode,
    ) -> Self {
        let lambda = dimension as f64 / 2.0;
        let len = coeffs.first().map_or(0, |c| c.len());
        let recurrence = (0..len)
            .map(|k| {
                let kf = k as f64;
                (2.0 * (kf + lambda) / (kf + 1.0), (kf + 2.0 * lambda - 1.0) / (kf + 1.0))
            })
            .collect();
        Self {
            dimension,
            directions,
            coeffs,
            summation,
            recurrence,
        }
    }

    /// `sum_k c[k] C_k(u)`, accumulating along the recurrence.
    #[inline]
    fn series(&self, c: &[f64], u: f64) -> f64 {
        if c.is_empty() {
            return 0.0;
        }
        let mut prev = 1.0;
        let mut acc = c[0];
        if c.len() == 1 {
            return acc;
        }
        let mut cur = self.recurrence[0].0 * u;
        acc += c[1] * cur;
        for k in 1..c.len() - 1 {
            let (a, b) = self.recurrence[k];
            let next = a * u * cur - b * prev;
            prev = cur;
            cur = next;
            acc += c[k + 1] * cur;
        }
        acc
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let views: Vec<f64> = self
            .directions
            .iter()
            .zip(&self.coeffs)
            .map(|(xi, c)| self.series(c, crate::dot(x, xi)))
            .collect();
        self.summation.sum(&views)
    }

    pub fn grid(&self, resolution: usize) -> Result<ImageGrid> {
        ImageGrid::from_fn(self.dimension, resolution, |x| self.eval(x))
    }

    /// Kernel degree `K`.
    pub fn degree(&self) -> usize {
        self.coeffs.first().map_or(0, |c| c.len().saturating_sub(1))
    }
}

/// Discrete OPED operator attached to a sinogram: the coefficients
/// `F_nu[k]` are formed once, leaving an `O(views * K)` series per point.
pub fn expansion_from_sinogram(
    sinogram: &Sinogram,
    table: &KernelTable,
    summation: SummationMode,
) -> Result<ViewExpansion> {
    let g = &sinogram.geometry;
    if table.dimension != g.dimension || table.node_values.len() != g.node_count() {
        return Err(Error::GeometryMismatch("kernel table does not match the sinogram".into()));
    }
    let d = g.dimension;
    let alpha = (d as f64 - 1.0) / 2.0;
    let slice = ball_volume(d - 1);
    let node_scale: Vec<f64> = g
        .nodes
        .iter()
        .zip(&g.weights)
        .map(|(&t, &w)| w / (slice * (1.0 - t * t).powf(alpha)))
        .collect();
    let coeffs = (0..g.view_count())
        .into_par_iter()
        .map(|nu| {
            let lam = g.directions.weights[nu];
            let row = sinogram.view(nu);
            table
                .factors
                .iter()
                .enumerate()
                .map(|(k, f)| {
                    let s: f64 = (0..row.len())
                        .map(|j| node_scale[j] * row[j] * table.node_values[j][k])
                        .sum();
                    lam * f * s
                })
                .collect()
        })
        .collect();
    Ok(ViewExpansion::new(d, g.directions.points.clone(), coeffs, summation))
}

/// Kernel degree used for a sinogram: its native order, or half of it
/// (with the `K = 2n` filtered kernel) when smoothing.
fn kernel_order(geometry: &ScanGeometry, filter: Filter) -> usize {
    let native = geometry.reconstruction_order();
    match filter {
        Filter::None => native,
        Filter::Eta => native / 2,
    }
}

/// Builds the operator for a configuration after checking the sinogram
/// against it.
pub fn reconstructor(sinogram: &Sinogram, config: &ReconstructionConfig) -> Result<ViewExpansion> {
    config.check(sinogram)?;
    let g = &sinogram.geometry;
    let n = kernel_order(g, config.filter);
    if config.filter == Filter::Eta && n == 0 {
        return Err(Error::OrderMismatch { expected: 2, found: g.reconstruction_order() });
    }
    let table = KernelTable::new(g.dimension, n, config.filter, &g.nodes)?;
    expansion_from_sinogram(sinogram, &table, config.summation)
}

/// Planar OPED `A_{2m}` (type I or II scan) on a grid over `[-1, 1]^2`.
pub fn oped2d(sinogram: &Sinogram, config: &ReconstructionConfig) -> Result<ImageGrid> {
    if sinogram.dimension() != 2 || !matches!(config.scan, ScanType::TypeI | ScanType::TypeII) {
        return Err(Error::GeometryMismatch("planar OPED needs a type I or II scan".into()));
    }
    reconstructor(sinogram, config)?.grid(config.resolution)
}

/// Three-dimensional OPED `A_n` on the product-rule scan.
pub fn oped3d(sinogram: &Sinogram, config: &ReconstructionConfig) -> Result<ImageGrid> {
    if sinogram.dimension() != 3 || config.scan != ScanType::GegenbauerGauss {
        return Err(Error::GeometryMismatch(
            "3D OPED needs a gegenbauer-gauss scan on S^2".into(),
        ));
    }
    reconstructor(sinogram, config)?.grid(config.resolution)
}

/// `S_n^eta f` from a sinogram whose native order is `2n`: the filtered
/// kernel runs to degree `2n` with weights `eta(k/n)`.
pub fn smoothed_reconstruct(
    sinogram: &Sinogram,
    resolution: usize,
    summation: SummationMode,
) -> Result<ImageGrid> {
    let g = &sinogram.geometry;
    let config = ReconstructionConfig {
        order: g.m_or_n,
        scan: g.scan,
        filter: Filter::Eta,
        resolution,
        summation,
    };
    reconstructor(sinogram, &config)?.grid(resolution)
}

/// Semi-discrete partial sum
/// `S_n f(x) = sum_nu lambda_nu b_d^{-1} \int R f(xi_nu, t) Phi_n(t, <x, xi_nu>) dt`
/// with the `t`-integral taken from the source's exact moments.
pub fn semi_discrete_expansion(
    source: &dyn RadonSource,
    cubature: &SphericalCubature,
    n: usize,
    filter: Filter,
    summation: SummationMode,
) -> Result<ViewExpansion> {
    let d = source.dimension();
    if cubature.dimension != d {
        return Err(Error::GeometryMismatch(format!(
            "{d}-dimensional source with a cubature on S^{}",
            cubature.dimension - 1
        )));
    }
    let factors = kernel_factors(d, n, filter);
    let degree = factors.len() - 1;
    if cubature.degree < 2 * degree {
        return Err(Error::InsufficientDegree {
            required: 2 * degree,
            available: cubature.degree,
        });
    }
    let volume = ball_volume(d);
    let coeffs = cubature
        .points
        .par_iter()
        .zip(cubature.weights.par_iter())
        .map(|(xi, &lam)| {
            let m = source.gegenbauer_moments(xi, degree)?;
            Ok(factors
                .iter()
                .zip(&m)
                .map(|(f, mk)| lam * f * mk / volume)
                .collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(ViewExpansion::new(d, cubature.points.clone(), coeffs, summation))
}

/// Pointwise [`semi_discrete_expansion`].
pub fn semi_discrete_partial_sum(
    source: &dyn RadonSource,
    cubature: &SphericalCubature,
    n: usize,
    x: &[f64],
) -> Result<f64> {
    Ok(semi_discrete_expansion(source, cubature, n, Filter::None, SummationMode::Sequential)?.eval(x))
}

/// `Lambda_n(x) = sum_nu lambda_nu sum_j w_j |Phi_n(t_j, <x, xi_nu>)|`, the
/// sup-norm amplification at `x` of data bounded by the Radon bound
/// `|R f| <= b_{d-1} rho(t) |f|_inf`.
pub fn lebesgue_function(geometry: &ScanGeometry, table: &KernelTable, x: &[f64]) -> f64 {
    let mut phi = vec![0.0; geometry.node_count()];
    let mut total = 0.0;
    for (xi, &lam) in geometry.directions.points.iter().zip(&geometry.directions.weights) {
        table.phi_at_nodes(crate::dot(x, xi), &mut phi);
        total += lam
            * phi
                .iter()
                .zip(&geometry.weights)
                .map(|(p, w)| w * p.abs())
                .sum::<f64>();
    }
    total
}

/// Maximum of [`lebesgue_function`] over the in-ball points of a grid.
pub fn max_lebesgue(geometry: &ScanGeometry, filter: Filter, resolution: usize) -> Result<f64> {
    let n = kernel_order(geometry, filter);
    let table = KernelTable::new(geometry.dimension, n, filter, &geometry.nodes)?;
    let grid = ImageGrid::from_fn(geometry.dimension, resolution, |x| {
        lebesgue_function(geometry, &table, x)
    })?;
    Ok(grid
        .values
        .iter()
        .zip(&grid.mask)
        .filter(|(_, &m)| m)
        .fold(0.0, |acc, (&v, _)| acc.max(v)))
}

/// How far the reconstruction leaves the value range of the reference,
/// over the in-ball points: `max(max rec - max ref, min ref - min rec, 0)`.
pub fn range_overshoot(reconstruction: &ImageGrid, reference: &ImageGrid) -> Result<f64> {
    reconstruction.metrics(reference)?;
    let range = |g: &ImageGrid| {
        g.values
            .iter()
            .zip(&g.mask)
            .filter(|(_, &m)| m)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (&v, _)| (lo.min(v), hi.max(v)))
    };
    let (rlo, rhi) = range(reconstruction);
    let (lo, hi) = range(reference);
    Ok((rhi - hi).max(lo - rlo).max(0.0))
}
