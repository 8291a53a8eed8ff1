//! Forward Radon transform: a deterministic numerical oracle, closed forms
//! for phantoms and polynomials, scanning geometries and sinograms.
//!
//! A sinogram stores `R f(xi_nu, t_j)` for directions `xi_nu` with cubature
//! weights `lambda_nu` and offsets `t_j`. The offsets carry *effective*
//! weights `w_j`: normalized weights (summing to one) of a rule for the
//! profile weight `rho(t) = (1 - t^2)^{(d-1)/2}`, so that for a polynomial
//! `p`
//!
//! ```text
//! \int rho(t) p(t) dt = (b_d / b_{d-1}) sum_j w_j p(t_j).
//! ```
//!
//! Container layout (`OPEDSINO`): the 16-byte magic
//! `b"OPEDSINO\0\0\0\0\0\0\0\x01"` (last byte is the format version), a
//! little-endian `u64` header length, the UTF-8 JSON header, then the values
//! as little-endian `f64` in `[nu][j]` order.

use std::f64::consts::PI;
use std::path::Path;
use std::sync::OnceLock;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    circle_directions, half_circle_directions, orthogonal_frame, sphere_product_cubature,
    SphericalCubature,
};
use crate::phantom::{Phantom, Polynomial, TestObject};
use crate::specfun::{
    ball_volume, gauss_chebyshev_first, gauss_gegenbauer_rule, gauss_legendre_rule,
    gegenbauer_fill,
};

pub const MAGIC: [u8; 16] = *b"OPEDSINO\0\0\0\0\0\0\0\x01";

const PANEL_POINTS: usize = 8;
const REL_TOL: f64 = 1e-13;
const MAX_PANELS: usize = 4000;
const JUMP_SCALE: f64 = 1e-4;
/// Absolute tolerances for the inner and outer variables of nested
/// integrals; the outer one is looser because its integrand is itself a
/// quadrature result.
const INNER_ABS_TOL: f64 = 1e-14;
const OUTER_ABS_TOL: f64 = 1e-11;

fn reference_rule(points: usize) -> (Vec<f64>, Vec<f64>) {
    let r = gauss_legendre_rule(points).expect("Gauss-Legendre panel rule");
    // weights rescaled to the reference interval [-1, 1]
    (r.nodes, r.weights.iter().map(|w| 2.0 * w).collect())
}

fn panel_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| reference_rule(PANEL_POINTS))
}

fn check_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| reference_rule(PANEL_POINTS - 1))
}

fn apply<F: FnMut(f64) -> Result<f64>>(
    rule: &(Vec<f64>, Vec<f64>),
    g: &mut F,
    a: f64,
    b: f64,
) -> Result<f64> {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let mut s = 0.0;
    for (&x, &w) in rule.0.iter().zip(&rule.1) {
        s += w * g(mid + half * x)?;
    }
    Ok(half * s)
}

fn panel<F: FnMut(f64) -> Result<f64>>(g: &mut F, a: f64, b: f64) -> Result<f64> {
    apply(panel_rule(), g, a, b)
}

/// Weights extrapolating the node interpolant to `t = -1` and `t = 1`.
fn end_weights() -> &'static (Vec<f64>, Vec<f64>) {
    static W: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    W.get_or_init(|| {
        let nodes = &panel_rule().0;
        let lagrange = |x: f64| -> Vec<f64> {
            (0..nodes.len())
                .map(|i| {
                    (0..nodes.len())
                        .filter(|&k| k != i)
                        .map(|k| (x - nodes[k]) / (nodes[i] - nodes[k]))
                        .product()
                })
                .collect()
        };
        (lagrange(-1.0), lagrange(1.0))
    })
}

/// Gauss value on `[a, b]` plus an estimate of what the nodes cannot see:
/// the endpoint values are compared with the node interpolant, and a
/// mismatch is weighted by the unsampled gap at that end, fully once it
/// reaches `JUMP_SCALE` relative to the mean `|g|`.
/// Also returns the panel's estimate of `\int |g|`.
fn panel_checked<F: FnMut(f64) -> Result<f64>>(g: &mut F, a: f64, b: f64) -> Result<(f64, f64, f64)> {
    let (nodes, weights) = panel_rule();
    let (lo, hi) = end_weights();
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let (mut s, mut m, mut pa, mut pb) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..nodes.len() {
        let v = g(mid + half * nodes[i])?;
        s += weights[i] * v;
        m += weights[i] * v.abs();
        pa += lo[i] * v;
        pb += hi[i] * v;
    }
    let gap = half * (1.0 + nodes[0]);
    let mismatch = (g(a)? - pa).abs() + (g(b)? - pb).abs();
    // mismatches small against the mean |g| are interpolation error, not jumps
    let relative = mismatch / (0.5 * m).max(f64::MIN_POSITIVE);
    let jump = (relative / JUMP_SCALE).powi(2).min(1.0);
    Ok((half * s, mismatch * gap * jump, half * m))
}

struct Panel {
    a: f64,
    b: f64,
    left: f64,
    right: f64,
    error: f64,
    mass: f64,
}

impl Panel {
    fn new<F: FnMut(f64) -> Result<f64>>(g: &mut F, a: f64, b: f64, whole: f64) -> Result<Self> {
        let m = 0.5 * (a + b);
        let (left, blind_left, mass_left) = panel_checked(g, a, m)?;
        let (right, blind_right, mass_right) = panel_checked(g, m, b)?;
        // a second, independent estimate guards against accidental
        // agreement of the two levels across a jump
        let low = (apply(check_rule(), g, a, m)? - left).abs()
            + (apply(check_rule(), g, m, b)? - right).abs();
        Ok(Panel {
            a,
            b,
            left,
            right,
            error: (left + right - whole).abs().max(low) + blind_left + blind_right,
            mass: mass_left + mass_right,
        })
    }
}

fn integrate_with<F: FnMut(f64) -> Result<f64>>(
    mut g: F,
    a: f64,
    b: f64,
    panels: usize,
    abs_tol: f64,
) -> Result<f64> {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut list = Vec::with_capacity(panels);
    for i in 0..panels {
        let (lo, hi) = (a + i as f64 * h, a + (i + 1) as f64 * h);
        let whole = panel(&mut g, lo, hi)?;
        list.push(Panel::new(&mut g, lo, hi, whole)?);
    }
    while list.len() < panels + MAX_PANELS {
        let mass: f64 = list.iter().map(|p| p.mass).sum();
        let error: f64 = list.iter().map(|p| p.error).sum();
        if error <= abs_tol.max(REL_TOL * mass) {
            break;
        }
        // bisect the worst panel (first one on ties, for determinism)
        let worst = list
            .iter()
            .enumerate()
            .fold(0, |best, (i, p)| if p.error > list[best].error { i } else { best });
        let p = list.swap_remove(worst);
        let m = 0.5 * (p.a + p.b);
        list.push(Panel::new(&mut g, p.a, m, p.left)?);
        list.push(Panel::new(&mut g, m, p.b, p.right)?);
    }
    let mut parts: Vec<(f64, f64)> = list.iter().map(|p| (p.a, p.left + p.right)).collect();
    parts.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok(parts.iter().map(|p| p.1).sum())
}

/// Globally adaptive composite 8-point Gauss-Legendre integration over
/// `[a, b]`: starts from `panels` equal panels and keeps bisecting the panel
/// with the largest local error estimate (the larger of the one-level
/// refinement difference and an 8-versus-7-point comparison, plus an
/// endpoint check for jumps between the outermost nodes and the panel ends)
/// until the summed estimate is below tolerance, relative to `\int |g|`, or
/// the panel budget is exhausted.
pub fn integrate_adaptive<F: FnMut(f64) -> Result<f64>>(
    g: F,
    a: f64,
    b: f64,
    panels: usize,
) -> Result<f64> {
    integrate_with(g, a, b, panels, INNER_ABS_TOL)
}

fn checked<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64]) -> Result<f64> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { point: x.to_vec() })
    }
}

fn check_direction(xi: &[f64], d: usize) -> Result<()> {
    if xi.len() != d {
        return Err(Error::GeometryMismatch(format!(
            "direction {xi:?} is not {d}-dimensional"
        )));
    }
    if (crate::dot(xi, xi).sqrt() - 1.0).abs() > 1e-12 {
        return Err(Error::invalid(format!("direction {xi:?} is not a unit vector")));
    }
    Ok(())
}

/// Line (`d = 2`) or plane (`d = 3`) integral of `f` over
/// `{x : <x, xi> = t} ∩ B^d`, by adaptive composite Gauss rules: along the
/// chord for `d = 2`, and in polar coordinates over the section disk for
/// `d = 3`. `refinement` is the initial panel count per variable.
pub fn radon_numeric<F>(f: &F, xi: &[f64], t: f64, refinement: usize) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    let d = xi.len();
    check_direction(xi, d)?;
    if !t.is_finite() {
        return Err(Error::invalid("offset must be finite"));
    }
    if t.abs() >= 1.0 {
        return Ok(0.0);
    }
    let frame = orthogonal_frame(xi)?;
    let s = (1.0 - t * t).sqrt();
    let eval = |x: &[f64]| checked(&f, x);
    match d {
        2 => {
            let mut x = [0.0; 2];
            integrate_adaptive(
                |y| {
                    frame.point(t, &[y], &mut x);
                    eval(&x)
                },
                -s,
                s,
                refinement,
            )
        }
        3 => {
            let mut x = [0.0; 3];
            integrate_with(
                |r| {
                    let inner = integrate_adaptive(
                        |phi| {
                            frame.point(t, &[r * phi.cos(), r * phi.sin()], &mut x);
                            eval(&x)
                        },
                        0.0,
                        2.0 * PI,
                        refinement,
                    )?;
                    Ok(r * inner)
                },
                0.0,
                s,
                refinement,
                OUTER_ABS_TOL,
            )
        }
        _ => Err(Error::invalid(format!("numeric Radon transform supports d = 2, 3 (got {d})"))),
    }
}

/// Exact Radon transform of a polynomial by a fixed Gauss rule on the
/// section (exact for the polynomial's degree).
pub fn radon_polynomial(p: &Polynomial, xi: &[f64], t: f64) -> Result<f64> {
    let d = p.dimension;
    check_direction(xi, d)?;
    if t.abs() >= 1.0 {
        return Ok(0.0);
    }
    let deg = p.degree();
    let frame = orthogonal_frame(xi)?;
    let s = (1.0 - t * t).sqrt();
    let line = gauss_legendre_rule(deg / 2 + 1)?;
    match d {
        2 => {
            let mut x = [0.0; 2];
            Ok(2.0
                * s
                * line.integrate(|y| {
                    frame.point(t, &[s * y], &mut x);
                    p.eval(&x)
                }))
        }
        3 => {
            // r * P(r cos, r sin) has degree deg + 1 in r
            let radial = gauss_legendre_rule(deg / 2 + 2)?;
            let count = deg + 1;
            let mut x = [0.0; 3];
            let mut total = 0.0;
            for (&u, &w) in radial.nodes.iter().zip(&radial.weights) {
                let r = 0.5 * s * (u + 1.0);
                let mut ring = 0.0;
                for k in 0..count {
                    let phi = 2.0 * PI * k as f64 / count as f64;
                    frame.point(t, &[r * phi.cos(), r * phi.sin()], &mut x);
                    ring += p.eval(&x);
                }
                total += w * r * ring / count as f64;
            }
            Ok(total * s * 2.0 * PI)
        }
        _ => Err(Error::invalid(format!("d = {d} is not supported"))),
    }
}

/// Something whose Radon projections can be sampled.
pub trait RadonSource: Sync {
    fn dimension(&self) -> usize;

    fn radon(&self, xi: &[f64], t: f64) -> Result<f64>;

    /// `\int_{-1}^{1} R f(xi, t) C_k^{d/2}(t) dt` for `k = 0..=max_k`.
    /// The default integrates sampled projections adaptively.
    fn gegenbauer_moments(&self, xi: &[f64], max_k: usize) -> Result<Vec<f64>> {
        let lambda = self.dimension() as f64 / 2.0;
        let mut buf = vec![0.0; max_k + 1];
        (0..=max_k)
            .map(|k| {
                integrate_adaptive(
                    |t| {
                        gegenbauer_fill(lambda, t, &mut buf[..=k]);
                        Ok(self.radon(xi, t)? * buf[k])
                    },
                    -1.0,
                    1.0,
                    16,
                )
            })
            .collect()
    }
}

impl RadonSource for Phantom {
    fn dimension(&self) -> usize {
        Phantom::dimension(self)
    }

    fn radon(&self, xi: &[f64], t: f64) -> Result<f64> {
        check_direction(xi, Phantom::dimension(self))?;
        Ok(Phantom::radon(self, xi, t))
    }

    fn gegenbauer_moments(&self, xi: &[f64], max_k: usize) -> Result<Vec<f64>> {
        check_direction(xi, Phantom::dimension(self))?;
        Phantom::gegenbauer_moments(self, xi, max_k)
    }
}

/// `R f(xi, t) / rho(t)` is a polynomial of the same degree for polynomial
/// `f`, so the moments are exact with a Gauss rule for `rho`.
fn polynomial_moments(p: &Polynomial, xi: &[f64], max_k: usize) -> Result<Vec<f64>> {
    let d = p.dimension;
    let alpha = (d as f64 - 1.0) / 2.0;
    let rule = gauss_gegenbauer_rule(alpha, (p.degree() + max_k) / 2 + 1)?;
    let scale = ball_volume(d) / ball_volume(d - 1);
    let lambda = d as f64 / 2.0;
    let mut out = vec![0.0; max_k + 1];
    let mut c = vec![0.0; max_k + 1];
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        let profile = radon_polynomial(p, xi, t)? / (1.0 - t * t).powf(alpha);
        gegenbauer_fill(lambda, t, &mut c);
        for (o, ck) in out.iter_mut().zip(&c) {
            *o += scale * w * profile * ck;
        }
    }
    Ok(out)
}

impl RadonSource for Polynomial {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn radon(&self, xi: &[f64], t: f64) -> Result<f64> {
        radon_polynomial(self, xi, t)
    }

    fn gegenbauer_moments(&self, xi: &[f64], max_k: usize) -> Result<Vec<f64>> {
        check_direction(xi, self.dimension)?;
        polynomial_moments(self, xi, max_k)
    }
}

impl RadonSource for TestObject {
    fn dimension(&self) -> usize {
        TestObject::dimension(self)
    }

    fn radon(&self, xi: &[f64], t: f64) -> Result<f64> {
        match self {
            TestObject::Phantom(p) => RadonSource::radon(p, xi, t),
            TestObject::Polynomial(p) => RadonSource::radon(p, xi, t),
        }
    }

    fn gegenbauer_moments(&self, xi: &[f64], max_k: usize) -> Result<Vec<f64>> {
        match self {
            TestObject::Phantom(p) => RadonSource::gegenbauer_moments(p, xi, max_k),
            TestObject::Polynomial(p) => RadonSource::gegenbauer_moments(p, xi, max_k),
        }
    }
}

/// An arbitrary pointwise function, projected with [`radon_numeric`].
pub struct NumericSource<F> {
    pub dimension: usize,
    pub function: F,
    pub refinement: usize,
}

impl<F: Fn(&[f64]) -> f64 + Sync> RadonSource for NumericSource<F> {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn radon(&self, xi: &[f64], t: f64) -> Result<f64> {
        check_direction(xi, self.dimension)?;
        radon_numeric(&self.function, xi, t, self.refinement)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScanType {
    /// `d = 2`: `2m+1` directions, offsets at Chebyshev first-kind nodes.
    #[serde(rename = "type-I")]
    TypeI,
    /// `d = 2`: `2m+1` directions, offsets at Chebyshev second-kind nodes.
    #[serde(rename = "type-II")]
    TypeII,
    /// `n+1` half-circle directions (`d = 2`) or the `(n+1)^2` product rule
    /// (`d = 3`), offsets at Gauss-Gegenbauer nodes for `rho`.
    #[serde(rename = "gegenbauer-gauss")]
    GegenbauerGauss,
    #[serde(rename = "custom")]
    Custom,
}

impl std::fmt::Display for ScanType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ScanType::TypeI => "type-I",
            ScanType::TypeII => "type-II",
            ScanType::GegenbauerGauss => "gegenbauer-gauss",
            ScanType::Custom => "custom",
        };
        f.write_str(s)
    }
}

/// Directions and offsets of a scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanGeometry {
    #[serde(rename = "d")]
    pub dimension: usize,
    #[serde(rename = "geometry")]
    pub scan: ScanType,
    /// `m` for the planar type I/II scans, `n` otherwise.
    pub m_or_n: usize,
    pub directions: SphericalCubature,
    pub nodes: Vec<f64>,
    /// Effective weights for `rho`, summing to one.
    pub weights: Vec<f64>,
    /// Highest `k` for which `sum_j w_j p(t_j)` is exact on `rho`-weighted
    /// polynomials of degree `k`.
    pub node_degree: usize,
}

impl ScanGeometry {
    /// Built-in scan of the given type and order.
    pub fn new(d: usize, scan: ScanType, order: usize) -> Result<Self> {
        if order == 0 && matches!(scan, ScanType::TypeI | ScanType::TypeII) {
            return Err(Error::invalid("type I/II scans need order m >= 1"));
        }
        match (d, scan) {
            (2, ScanType::TypeI) => {
                let m = order;
                let rule = gauss_chebyshev_first(2 * m + 1);
                let weights = rule
                    .nodes
                    .iter()
                    .map(|t| 2.0 * (1.0 - t * t) / (2 * m + 1) as f64)
                    .collect();
                Ok(Self {
                    dimension: 2,
                    scan,
                    m_or_n: m,
                    directions: circle_directions(m),
                    nodes: rule.nodes,
                    weights,
                    node_degree: 4 * m - 1,
                })
            }
            (2, ScanType::TypeII) => {
                let m = order;
                let rule = gauss_gegenbauer_rule(0.5, 2 * m)?;
                Ok(Self {
                    dimension: 2,
                    scan,
                    m_or_n: m,
                    directions: circle_directions(m),
                    nodes: rule.nodes,
                    weights: rule.weights,
                    node_degree: 4 * m - 1,
                })
            }
            (2 | 3, ScanType::GegenbauerGauss) => {
                let n = order;
                let directions = if d == 2 {
                    half_circle_directions(n)
                } else {
                    sphere_product_cubature(n)?
                };
                let rule = gauss_gegenbauer_rule((d as f64 - 1.0) / 2.0, n + 1)?;
                Ok(Self {
                    dimension: d,
                    scan,
                    m_or_n: n,
                    directions,
                    nodes: rule.nodes,
                    weights: rule.weights,
                    node_degree: 2 * n + 1,
                })
            }
            (_, ScanType::Custom) => Err(Error::invalid(
                "custom geometries are built with ScanGeometry::custom",
            )),
            _ => Err(Error::GeometryMismatch(format!("scan {scan} is not available for d = {d}"))),
        }
    }

    /// A user-supplied scan; `weights` are effective `rho` weights.
    pub fn custom(
        directions: SphericalCubature,
        nodes: Vec<f64>,
        weights: Vec<f64>,
        node_degree: usize,
        order: usize,
    ) -> Result<Self> {
        let g = Self {
            dimension: directions.dimension,
            scan: ScanType::Custom,
            m_or_n: order,
            directions,
            nodes,
            weights,
            node_degree,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        self.directions.validate()?;
        if self.directions.dimension != self.dimension {
            return Err(Error::GeometryMismatch("direction dimension differs from d".into()));
        }
        if self.nodes.len() != self.weights.len() || self.nodes.is_empty() {
            return Err(Error::Format("nodes/weights length mismatch".into()));
        }
        if self.nodes.iter().any(|t| !(t.abs() < 1.0)) || self.weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Format("offsets must lie in (-1, 1) with finite weights".into()));
        }
        Ok(())
    }

    pub fn view_count(&self) -> usize {
        self.directions.len()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Order of the reconstruction operator natively carried by the scan:
    /// `2m` for type I/II, `n` otherwise.
    pub fn reconstruction_order(&self) -> usize {
        match self.scan {
            ScanType::TypeI | ScanType::TypeII => 2 * self.m_or_n,
            _ => self.m_or_n,
        }
    }
}

/// Sampled projections `values[nu * nodes + j] = R f(xi_nu, t_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sinogram {
    pub geometry: ScanGeometry,
    pub values: Vec<f64>,
}

impl Sinogram {
    pub fn new(geometry: ScanGeometry, values: Vec<f64>) -> Result<Self> {
        geometry.validate()?;
        let expected = geometry.view_count() * geometry.node_count();
        if values.len() != expected {
            return Err(Error::Format(format!(
                "sinogram has {} values, geometry needs {expected}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Format(format!("sinogram value {i} is not finite")));
        }
        Ok(Self { geometry, values })
    }

    pub fn dimension(&self) -> usize {
        self.geometry.dimension
    }

    pub fn value(&self, nu: usize, j: usize) -> f64 {
        self.values[nu * self.geometry.node_count() + j]
    }

    pub fn view(&self, nu: usize) -> &[f64] {
        let n = self.geometry.node_count();
        &self.values[nu * n..(nu + 1) * n]
    }

    /// `alpha * self + beta * other` on the same geometry.
    pub fn combine(&self, alpha: f64, other: &Sinogram, beta: f64) -> Result<Sinogram> {
        if self.geometry != other.geometry {
            return Err(Error::GeometryMismatch("sinograms use different scans".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        Ok(Sinogram {
            geometry: self.geometry.clone(),
            values,
        })
    }

    /// Adds `N(0, sigma^2)` noise to every value in `[nu][j]` order, drawn
    /// from a ChaCha8 stream seeded with `seed`.
    pub fn add_noise(&mut self, sigma: f64, seed: u64) -> Result<()> {
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(Error::invalid("noise level must be finite and >= 0"));
        }
        if sigma == 0.0 {
            return Ok(());
        }
        let normal = Normal::new(0.0, sigma).map_err(|e| Error::invalid(e.to_string()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for v in &mut self.values {
            *v += normal.sample(&mut rng);
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let header = serde_json::to_vec(&self.geometry)?;
        let mut out = Vec::with_capacity(24 + header.len() + 8 * self.values.len());
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&(header.len() as u64).to_le_bytes());
        out.extend_from_slice(&header);
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 24 || bytes[..8] != MAGIC[..8] {
            return Err(Error::Format("not an OPEDSINO container".into()));
        }
        if bytes[8..16] != MAGIC[8..16] {
            return Err(Error::Format(format!(
                "unsupported OPEDSINO version {}",
                bytes[15]
            )));
        }
        let len = u64::from_le_bytes(bytes[16..24].try_into().expect("8 bytes")) as usize;
        let body = bytes
            .get(24..)
            .filter(|b| b.len() >= len)
            .ok_or_else(|| Error::Format("truncated OPEDSINO header".into()))?;
        let geometry: ScanGeometry = serde_json::from_slice(&body[..len])?;
        let payload = &body[len..];
        if payload.len() % 8 != 0 {
            return Err(Error::Format("OPEDSINO payload is not a whole number of f64".into()));
        }
        let values = payload
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        Sinogram::new(geometry, values)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}

/// Samples `source` on every (direction, offset) pair of `geometry`. Each
/// entry is computed independently, so the result does not depend on the
/// thread schedule.
pub fn sample_sinogram(source: &dyn RadonSource, geometry: &ScanGeometry) -> Result<Sinogram> {
    geometry.validate()?;
    if source.dimension() != geometry.dimension {
        return Err(Error::GeometryMismatch(format!(
            "{}-dimensional object on a {}-dimensional scan",
            source.dimension(),
            geometry.dimension
        )));
    }
    let nj = geometry.node_count();
    let values = (0..geometry.view_count() * nj)
        .into_par_iter()
        .map(|idx| {
            let (xi, t) = (&geometry.directions.points[idx / nj], geometry.nodes[idx % nj]);
            let v = source.radon(xi, t)?;
            if v.is_finite() {
                Ok(v)
            } else {
                let mut point = xi.clone();
                point.push(t);
                Err(Error::NonFinite { point })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Sinogram::new(geometry.clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phantom::{poly_preset, ComponentSpec, Monomial};
    use crate::specfun::gegenbauer;

    fn one(_: &[f64]) -> f64 {
        1.0
    }

    #[test]
    fn constant_projections() {
        for t in [-0.7, 0.0, 0.3, 0.95] {
            let r = radon_numeric(&one, &[0.6, 0.8], t, 64).unwrap();
            assert!((r - 2.0 * (1.0 - t * t).sqrt()).abs() < 1e-10);
            let r = radon_numeric(&one, &[0.0, 0.6, 0.8], t, 4).unwrap();
            assert!((r - PI * (1.0 - t * t)).abs() < 1e-10);
        }
        assert_eq!(radon_numeric(&one, &[1.0, 0.0], 1.0, 4).unwrap(), 0.0);
    }

    #[test]
    fn non_finite_values_are_reported() {
        let f = |x: &[f64]| if x[1] > 0.5 { f64::NAN } else { 1.0 };
        match radon_numeric(&f, &[1.0, 0.0], 0.0, 8) {
            Err(Error::NonFinite { point }) => assert!(point[1] > 0.5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(radon_numeric(&one, &[1.0, 1.0], 0.0, 8).is_err());
    }

    #[test]
    fn off_center_ellipse_matches_oracle() {
        let spec = ComponentSpec {
            center: vec![0.2, -0.1],
            axes: vec![0.5, 0.25],
            rotation: vec![33.0],
            density: 1.5,
        };
        let p = Phantom::new(2, vec![spec]).unwrap();
        let f = |x: &[f64]| p.eval(x);
        for i in 0..20 {
            let phi = 0.917 * i as f64;
            let xi = [phi.cos(), phi.sin()];
            let t = -0.75 + 0.075 * i as f64;
            let exact = p.radon(&xi, t);
            let numeric = radon_numeric(&f, &xi, t, 32).unwrap();
            assert!((exact - numeric).abs() < 1e-6, "{i}: {exact} vs {numeric}");
        }
    }

    #[test]
    fn ellipsoid_matches_oracle() {
        let spec = ComponentSpec {
            center: vec![0.1, 0.2, -0.1],
            axes: vec![0.5, 0.3, 0.4],
            rotation: vec![20.0, 50.0, -10.0],
            density: 1.0,
        };
        let p = Phantom::new(3, vec![spec]).unwrap();
        let f = |x: &[f64]| p.eval(x);
        for (xi, t) in [([0.0, 0.6, 0.8], 0.1), ([0.48, 0.6, 0.64], -0.2)] {
            let exact = p.radon(&xi, t);
            let numeric = radon_numeric(&f, &xi, t, 8).unwrap();
            assert!((exact - numeric).abs() < 1e-6, "{exact} vs {numeric}");
        }
    }

    #[test]
    fn numeric_projection_is_even() {
        let f = |x: &[f64]| (x[0] + 2.0 * x[1]).exp() * (1.0 + x[0] * x[1]);
        for i in 0..10 {
            let phi = 0.63 * i as f64;
            let xi = [phi.cos(), phi.sin()];
            let t = -0.9 + 0.19 * i as f64;
            let a = radon_numeric(&f, &xi, t, 16).unwrap();
            let b = radon_numeric(&f, &[-xi[0], -xi[1]], -t, 16).unwrap();
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn duality_with_gegenbauer_weights() {
        let f = |x: &[f64]| (1.0 + x[0]).ln_1p() + x[1] * x[1];
        let xi = [0.8, -0.6];
        for k in 0..5 {
            // ball side in polar coordinates of x
            let ball = integrate_adaptive(
                |r| {
                    let inner = integrate_adaptive(
                        |phi| {
                            let x = [r * phi.cos(), r * phi.sin()];
                            Ok(f(&x) * gegenbauer(1.0, k, crate::dot(&x, &xi)).unwrap())
                        },
                        0.0,
                        2.0 * PI,
                        8,
                    )?;
                    Ok(r * inner)
                },
                0.0,
                1.0,
                8,
            )
            .unwrap();
            let src = NumericSource {
                dimension: 2,
                function: f,
                refinement: 16,
            };
            let moments = src.gegenbauer_moments(&xi, k).unwrap();
            assert!((ball - moments[k]).abs() / PI < 1e-7);
        }
    }

    #[test]
    fn polynomial_profiles_have_matching_degree() {
        let p = poly_preset(4, 2).unwrap();
        let xi = [0.28, 0.96];
        let n = p.degree();
        // d + n nodes; divided differences of order n+1 vanish
        let ts: Vec<f64> = (0..n + 2).map(|i| -0.9 + 1.7 * i as f64 / (n + 1) as f64).collect();
        let mut g: Vec<f64> = ts
            .iter()
            .map(|&t| radon_numeric(&|x: &[f64]| p.eval(x), &xi, t, 4).unwrap() / (1.0 - t * t).sqrt())
            .collect();
        for level in 1..=n + 1 {
            for i in (level..g.len()).rev() {
                g[i] = (g[i] - g[i - 1]) / (ts[i] - ts[i - level]);
            }
        }
        assert!(g[n + 1].abs() < 1e-9, "{}", g[n + 1]);
        assert!(g[n].abs() > 1e-3);
    }

    #[test]
    fn polynomial_closed_form_matches_numeric() {
        for d in [2, 3] {
            let p = poly_preset(5, d).unwrap();
            let xi: Vec<f64> = if d == 2 { vec![0.6, -0.8] } else { vec![0.36, 0.48, 0.8] };
            for t in [-0.6, 0.1, 0.7] {
                let a = radon_polynomial(&p, &xi, t).unwrap();
                let b = radon_numeric(&|x: &[f64]| p.eval(x), &xi, t, 2).unwrap();
                assert!((a - b).abs() < 1e-12, "{d} {t}: {a} {b}");
            }
        }
    }

    #[test]
    fn mass_consistency() {
        let p = crate::phantom::shepp_logan_2d();
        let mass = p.mass();
        for phi in [0.0, 0.4, 2.1] {
            let xi = [f64::cos(phi), f64::sin(phi)];
            let m = integrate_adaptive(|t| Ok(p.radon(&xi, t)), -1.0, 1.0, 64).unwrap();
            assert!((m - mass).abs() / PI < 1e-8);
            let exact = p.gegenbauer_moments(&xi, 0).unwrap()[0];
            assert!((exact - mass).abs() < 1e-12);
        }
    }

    #[test]
    fn scan_shapes() {
        let g = ScanGeometry::new(2, ScanType::TypeII, 4).unwrap();
        assert_eq!((g.view_count(), g.node_count()), (9, 8));
        let mut expected: Vec<f64> = (1..=8).map(|j| (j as f64 * PI / 9.0).cos()).collect();
        expected.reverse();
        for (a, b) in g.nodes.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-15);
        }
        let g = ScanGeometry::new(2, ScanType::TypeI, 4).unwrap();
        assert_eq!((g.view_count(), g.node_count()), (9, 9));
        let g = ScanGeometry::new(3, ScanType::GegenbauerGauss, 2).unwrap();
        assert_eq!((g.view_count(), g.node_count()), (9, 3));
        assert!(ScanGeometry::new(3, ScanType::TypeII, 2).is_err());
        for g in [
            ScanGeometry::new(2, ScanType::TypeI, 3).unwrap(),
            ScanGeometry::new(2, ScanType::TypeII, 3).unwrap(),
            ScanGeometry::new(2, ScanType::GegenbauerGauss, 5).unwrap(),
            ScanGeometry::new(3, ScanType::GegenbauerGauss, 5).unwrap(),
        ] {
            assert!((g.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn effective_weights_integrate_profiles() {
        // sum_j w_j p(t_j) = \int rho p / \int rho on polynomials of degree <= node_degree
        for g in [
            ScanGeometry::new(2, ScanType::TypeI, 3).unwrap(),
            ScanGeometry::new(2, ScanType::TypeII, 3).unwrap(),
        ] {
            for k in 0..=g.node_degree {
                let q: f64 = g.nodes.iter().zip(&g.weights).map(|(t, w)| w * t.powi(k as i32)).sum();
                let exact = if k % 2 == 1 {
                    0.0
                } else {
                    // \int sqrt(1-t^2) t^k dt / (pi/2)
                    let m = k / 2;
                    let mut v = 1.0;
                    for i in 0..m {
                        v *= (2 * i + 1) as f64 / (2 * i + 4) as f64;
                    }
                    v
                };
                assert!((q - exact).abs() < 1e-14, "{:?} k={k}: {q} {exact}", g.scan);
            }
        }
    }

    #[test]
    fn container_round_trip_and_rejection() {
        let g = ScanGeometry::new(2, ScanType::TypeII, 3).unwrap();
        let disk = Phantom::unit_ball(2, 1.0).unwrap();
        let s = sample_sinogram(&disk, &g).unwrap();
        let bytes = s.to_bytes().unwrap();
        assert_eq!(&bytes[..16], &MAGIC);
        assert_eq!(Sinogram::from_bytes(&bytes).unwrap(), s);
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(Sinogram::from_bytes(&bad), Err(Error::Format(_))));
        assert!(Sinogram::from_bytes(&bytes[..bytes.len() - 3]).is_err());
        for nu in 0..g.view_count() {
            for (j, &t) in g.nodes.iter().enumerate() {
                assert!((s.value(nu, j) - 2.0 * (1.0 - t * t).sqrt()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn sampling_rejects_dimension_mismatch() {
        let g = ScanGeometry::new(3, ScanType::GegenbauerGauss, 2).unwrap();
        let disk = Phantom::unit_ball(2, 1.0).unwrap();
        assert!(matches!(sample_sinogram(&disk, &g), Err(Error::GeometryMismatch(_))));
    }

    #[test]
    fn noise_is_seeded() {
        let g = ScanGeometry::new(2, ScanType::TypeII, 2).unwrap();
        let p = Polynomial::new(2, vec![Monomial { coef: 1.0, powers: vec![0, 0] }]).unwrap();
        let clean = sample_sinogram(&p, &g).unwrap();
        let mut a = clean.clone();
        let mut b = clean.clone();
        a.add_noise(0.1, 7).unwrap();
        b.add_noise(0.1, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, clean);
        let mut c = clean.clone();
        c.add_noise(0.0, 7).unwrap();
        assert_eq!(c, clean);
    }
}
