//! Test objects on the unit ball: constant-density ellipse/ellipsoid
//! phantoms with closed-form Radon projections, explicit polynomials, and
//! sampled image grids.
//!
//! Rotations are given in degrees. In `d = 2` a component carries one angle,
//! the counterclockwise rotation of its first semi-axis from the `x1` axis.
//! In `d = 3` it carries Z-Y-Z Euler angles `(a, b, c)`, and the body frame
//! is mapped to the world frame by `R = Rz(a) Ry(b) Rz(c)` with
//! right-handed (counterclockwise) elementary rotations.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{ball_volume, gauss_gegenbauer_rule, QuadratureRule};

const SHEPP_LOGAN_2D: &str = include_str!("../data/shepp_logan_2d.json");

/// Serialized form of one component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentSpec {
    pub center: Vec<f64>,
    pub axes: Vec<f64>,
    #[serde(default)]
    pub rotation: Vec<f64>,
    pub density: f64,
}

/// An ellipse or ellipsoid with constant density, cached in body-frame form.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    spec: ComponentSpec,
    /// Columns are the body axes in world coordinates.
    rotation: Vec<Vec<f64>>,
    axes_product: f64,
}

fn rot2(deg: f64) -> Vec<Vec<f64>> {
    let (s, c) = deg.to_radians().sin_cos();
    vec![vec![c, -s], vec![s, c]]
}

fn rz(deg: f64) -> [[f64; 3]; 3] {
    let (s, c) = deg.to_radians().sin_cos();
    [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
}

fn ry(deg: f64) -> [[f64; 3]; 3] {
    let (s, c) = deg.to_radians().sin_cos();
    [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]]
}

fn mul3(a: [[f64; 3]; 3], b: [[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

impl Component {
    pub fn new(spec: ComponentSpec) -> Result<Self> {
        let d = spec.center.len();
        if !(d == 2 || d == 3) {
            return Err(Error::invalid(format!("components must live in d = 2 or 3, got {d}")));
        }
        if spec.axes.len() != d {
            return Err(Error::Format(format!("expected {d} semi-axes, got {}", spec.axes.len())));
        }
        if spec.axes.iter().any(|&a| !(a > 0.0) || !a.is_finite()) {
            return Err(Error::invalid("semi-axes must be positive"));
        }
        if !spec.density.is_finite() || spec.center.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("component parameters must be finite"));
        }
        let max_axis = spec.axes.iter().cloned().fold(0.0, f64::max);
        if crate::dot(&spec.center, &spec.center).sqrt() + max_axis > 1.0 + 1e-9 {
            return Err(Error::invalid(format!(
                "component centered at {:?} leaves the unit ball",
                spec.center
            )));
        }
        let angle = |i: usize| spec.rotation.get(i).copied().unwrap_or(0.0);
        let rotation = if d == 2 {
            if spec.rotation.len() > 1 {
                return Err(Error::Format("a 2D component takes one rotation angle".into()));
            }
            rot2(angle(0))
        } else {
            if spec.rotation.len() > 3 {
                return Err(Error::Format("a 3D component takes three Euler angles".into()));
            }
            mul3(mul3(rz(angle(0)), ry(angle(1))), rz(angle(2)))
                .iter()
                .map(|r| r.to_vec())
                .collect()
        };
        let axes_product = spec.axes.iter().product();
        Ok(Self {
            spec,
            rotation,
            axes_product,
        })
    }

    pub fn spec(&self) -> &ComponentSpec {
        &self.spec
    }

    pub fn density(&self) -> f64 {
        self.spec.density
    }

    /// Quadratic form `|D^{-1} R^T (x - c)|^2`; the component is `Q <= 1`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let d = self.spec.center.len();
        (0..d)
            .map(|i| {
                let body: f64 = (0..d)
                    .map(|r| self.rotation[r][i] * (x[r] - self.spec.center[r]))
                    .sum();
                (body / self.spec.axes[i]).powi(2)
            })
            .sum()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.quadratic_form(x) <= 1.0
    }

    /// Returns `(tau, scale)`: in body coordinates the hyperplane
    /// `<xi, x> = t` sits at signed distance `(t - tau) / scale` from the
    /// center of the unit ball.
    fn slab(&self, xi: &[f64]) -> (f64, f64) {
        let d = xi.len();
        let tau = crate::dot(xi, &self.spec.center);
        let scale = (0..d)
            .map(|i| {
                let body: f64 = (0..d).map(|r| self.rotation[r][i] * xi[r]).sum();
                (self.spec.axes[i] * body).powi(2)
            })
            .sum::<f64>()
            .sqrt();
        (tau, scale)
    }

    pub fn volume(&self) -> f64 {
        self.axes_product * ball_volume(self.spec.center.len())
    }

    /// Closed-form Radon projection of this component.
    pub fn radon(&self, xi: &[f64], t: f64) -> f64 {
        let d = xi.len();
        let (tau, scale) = self.slab(xi);
        let s = (t - tau) / scale;
        if s.abs() >= 1.0 {
            return 0.0;
        }
        let section = ball_volume(d - 1) * (1.0 - s * s).powf((d as f64 - 1.0) / 2.0);
        self.spec.density * self.axes_product / scale * section
    }

    /// `\int R(xi, t) g(t) dt` for a polynomial `g` of degree covered by
    /// `rule`, a Gauss-Gegenbauer rule for `(1 - s^2)^{(d-1)/2}`.
    fn moment_with<G: FnMut(f64) -> f64>(&self, xi: &[f64], rule: &QuadratureRule, mut g: G) -> f64 {
        let (tau, scale) = self.slab(xi);
        let d = xi.len();
        self.spec.density
            * self.axes_product
            * ball_volume(d)
            * rule.integrate(|s| g(tau + scale * s))
    }
}

/// A sum of constant-density ellipses (`d = 2`) or ellipsoids (`d = 3`).
#[derive(Debug, Clone, PartialEq)]
pub struct Phantom {
    dimension: usize,
    components: Vec<Component>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PhantomFile {
    d: usize,
    components: Vec<ComponentSpec>,
}

impl Phantom {
    pub fn new(d: usize, specs: Vec<ComponentSpec>) -> Result<Self> {
        if !(d == 2 || d == 3) {
            return Err(Error::invalid(format!("phantoms exist for d = 2, 3 (got {d})")));
        }
        let components = specs
            .into_iter()
            .map(|s| {
                if s.center.len() != d {
                    return Err(Error::Format(format!(
                        "component center {:?} is not {d}-dimensional",
                        s.center
                    )));
                }
                Component::new(s)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            dimension: d,
            components,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// Sum of the densities of the components containing `x`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.components
            .iter()
            .filter(|c| c.contains(x))
            .map(|c| c.density())
            .sum()
    }

    /// Closed-form Radon projection `R f(xi, t)`; `xi` must be a unit vector.
    pub fn radon(&self, xi: &[f64], t: f64) -> f64 {
        self.components.iter().map(|c| c.radon(xi, t)).sum()
    }

    /// Exact `\int_{-1}^{1} R f(xi, t) C_k^{d/2}(t) dt` for `k = 0..=max_k`,
    /// evaluated per component in its own slab coordinate.
    pub fn gegenbauer_moments(&self, xi: &[f64], max_k: usize) -> Result<Vec<f64>> {
        let d = self.dimension;
        let lambda = d as f64 / 2.0;
        let rule = gauss_gegenbauer_rule((d as f64 - 1.0) / 2.0, max_k / 2 + 1)?;
        let mut out = vec![0.0; max_k + 1];
        let mut buf = vec![0.0; max_k + 1];
        for c in &self.components {
            for (k, o) in out.iter_mut().enumerate() {
                *o += c.moment_with(xi, &rule, |t| {
                    crate::specfun::gegenbauer_fill(lambda, t, &mut buf[..=k]);
                    buf[k]
                });
            }
        }
        Ok(out)
    }

    /// Mean absolute error of `grid` against the phantom over the in-ball
    /// grid points inside each component; `None` for components that
    /// contain no grid point.
    pub fn component_mean_errors(&self, grid: &ImageGrid) -> Result<Vec<Option<f64>>> {
        if grid.dimension != self.dimension {
            return Err(Error::GeometryMismatch(format!(
                "{}-dimensional grid against a {}-dimensional phantom",
                grid.dimension, self.dimension
            )));
        }
        let mut sums = vec![(0.0, 0usize); self.components.len()];
        for (idx, (&v, _)) in grid.values.iter().zip(&grid.mask).enumerate().filter(|(_, (_, &m))| m) {
            let x = grid.point(idx);
            let e = (v - self.eval(&x)).abs();
            for (c, acc) in self.components.iter().zip(sums.iter_mut()) {
                if c.contains(&x) {
                    acc.0 += e;
                    acc.1 += 1;
                }
            }
        }
        Ok(sums
            .into_iter()
            .map(|(s, n)| if n > 0 { Some(s / n as f64) } else { None })
            .collect())
    }

    /// Exact integral of the phantom over the ball.
    pub fn mass(&self) -> f64 {
        self.components.iter().map(|c| c.density() * c.volume()).sum()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: PhantomFile = serde_json::from_str(s)?;
        Self::new(file.d, file.components)
    }

    pub fn to_json(&self) -> Result<String> {
        let file = PhantomFile {
            d: self.dimension,
            components: self.components.iter().map(|c| c.spec.clone()).collect(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn unit_ball(d: usize, density: f64) -> Result<Self> {
        Self::new(
            d,
            vec![ComponentSpec {
                center: vec![0.0; d],
                axes: vec![1.0; d],
                rotation: vec![],
                density,
            }],
        )
    }

    /// Rotates every component about the origin by `deg` degrees (`d = 2`).
    pub fn rotated_2d(&self, deg: f64) -> Result<Self> {
        if self.dimension != 2 {
            return Err(Error::invalid("planar rotation needs a 2D phantom"));
        }
        let r = rot2(deg);
        let specs = self
            .components
            .iter()
            .map(|c| {
                let mut s = c.spec.clone();
                let x = &c.spec.center;
                s.center = vec![r[0][0] * x[0] + r[0][1] * x[1], r[1][0] * x[0] + r[1][1] * x[1]];
                let a = s.rotation.first().copied().unwrap_or(0.0);
                s.rotation = vec![a + deg];
                s
            })
            .collect();
        Self::new(2, specs)
    }
}

/// The conventional ten-ellipse Shepp-Logan head phantom.
pub fn shepp_logan_2d() -> Phantom {
    Phantom::from_json(SHEPP_LOGAN_2D).expect("bundled Shepp-Logan data is valid")
}

/// A monomial `coef * prod x_i^{powers_i}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coef: f64,
    pub powers: Vec<u32>,
}

/// An explicit polynomial restricted to the unit ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    #[serde(rename = "d")]
    pub dimension: usize,
    #[serde(rename = "polynomial")]
    pub terms: Vec<Monomial>,
}

impl Polynomial {
    pub fn new(d: usize, terms: Vec<Monomial>) -> Result<Self> {
        if terms.iter().any(|m| m.powers.len() != d) {
            return Err(Error::Format("monomial powers do not match the dimension".into()));
        }
        Ok(Self { dimension: d, terms })
    }

    pub fn degree(&self) -> usize {
        self.terms
            .iter()
            .filter(|m| m.coef != 0.0)
            .map(|m| m.powers.iter().sum::<u32>() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|m| {
                m.coef
                    * m.powers
                        .iter()
                        .zip(x)
                        .map(|(&p, &xi)| xi.powi(p as i32))
                        .product::<f64>()
            })
            .sum()
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: f64, other: &Polynomial, beta: f64) -> Polynomial {
        let mut terms: Vec<Monomial> = self
            .terms
            .iter()
            .map(|m| Monomial { coef: alpha * m.coef, powers: m.powers.clone() })
            .collect();
        terms.extend(
            other
                .terms
                .iter()
                .map(|m| Monomial { coef: beta * m.coef, powers: m.powers.clone() }),
        );
        Polynomial { dimension: self.dimension, terms }
    }
}

/// Preset `poly_k`: `1`, `1 + x1`, `1 + x1 - x2^2` for `k = 0, 1, 2`, and
/// for `k >= 3` the `poly_2` terms plus `sum_{i=3}^k (-1)^i x1^{i-1} x_d / i`.
pub fn poly_preset(k: usize, d: usize) -> Result<Polynomial> {
    if !(d == 2 || d == 3) {
        return Err(Error::invalid(format!("poly presets exist for d = 2, 3 (got {d})")));
    }
    let mono = |coef: f64, powers: &[(usize, u32)]| {
        let mut p = vec![0u32; d];
        for &(axis, e) in powers {
            p[axis] += e;
        }
        Monomial { coef, powers: p }
    };
    let mut terms = vec![mono(1.0, &[])];
    if k >= 1 {
        terms.push(mono(1.0, &[(0, 1)]));
    }
    if k >= 2 {
        terms.push(mono(-1.0, &[(1, 2)]));
    }
    for i in 3..=k {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        terms.push(mono(sign / i as f64, &[(0, i as u32 - 1), (d - 1, 1)]));
    }
    Polynomial::new(d, terms)
}

/// Anything that can be evaluated pointwise on the ball and has a known
/// (closed-form or exactly computable) Radon transform.
#[derive(Debug, Clone, PartialEq)]
pub enum TestObject {
    Phantom(Phantom),
    Polynomial(Polynomial),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ObjectFile {
    Phantom(PhantomFile),
    Polynomial(Polynomial),
}

impl TestObject {
    pub fn dimension(&self) -> usize {
        match self {
            TestObject::Phantom(p) => p.dimension(),
            TestObject::Polynomial(p) => p.dimension,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            TestObject::Phantom(p) => p.eval(x),
            TestObject::Polynomial(p) => p.eval(x),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        match serde_json::from_str::<ObjectFile>(s)? {
            ObjectFile::Phantom(f) => Ok(TestObject::Phantom(Phantom::new(f.d, f.components)?)),
            ObjectFile::Polynomial(p) => Ok(TestObject::Polynomial(Polynomial::new(p.dimension, p.terms)?)),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        match self {
            TestObject::Phantom(p) => p.to_json(),
            TestObject::Polynomial(p) => Ok(serde_json::to_string_pretty(p)?),
        }
    }

    /// Built-in objects: `shepp-logan`, `unit-disk`, `unit-ball` and `poly_<k>`.
    pub fn preset(name: &str, d: usize) -> Result<Self> {
        match name {
            "shepp-logan" | "shepp_logan" => {
                if d != 2 {
                    return Err(Error::invalid("the Shepp-Logan preset is two-dimensional"));
                }
                Ok(TestObject::Phantom(shepp_logan_2d()))
            }
            "unit-disk" | "unit-ball" => Ok(TestObject::Phantom(Phantom::unit_ball(d, 1.0)?)),
            _ => {
                let k = name
                    .strip_prefix("poly_")
                    .and_then(|k| k.parse::<usize>().ok())
                    .ok_or_else(|| Error::invalid(format!("unknown preset '{name}'")))?;
                Ok(TestObject::Polynomial(poly_preset(k, d)?))
            }
        }
    }
}

/// Sampled values on the cube `[-1, 1]^d` at cell centers, row-major with
/// axis 0 (coordinate `x1`) slowest. Points outside the closed unit ball
/// are masked out and hold zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    pub dimension: usize,
    pub resolution: usize,
    pub values: Vec<f64>,
    pub mask: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSidecar {
    pub d: usize,
    pub resolution: usize,
    pub extent: [f64; 2],
    pub order: String,
    #[serde(default)]
    pub dtype: String,
}

/// Error norms over the masked (in-ball) points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridMetrics {
    /// Root-mean-square difference.
    pub l2: f64,
    /// `|a - b|_2 / |b|_2`, zero when both vanish.
    pub relative_l2: f64,
    pub linf: f64,
}

impl ImageGrid {
    pub fn coordinate(resolution: usize, i: usize) -> f64 {
        -1.0 + (2 * i + 1) as f64 / resolution as f64
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Coordinates of the flat index `idx`.
    pub fn point(&self, idx: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.dimension];
        let mut rem = idx;
        for a in (0..self.dimension).rev() {
            x[a] = Self::coordinate(self.resolution, rem % self.resolution);
            rem /= self.resolution;
        }
        x
    }

    /// Evaluates `f` at every in-ball grid point, in parallel.
    pub fn from_fn<F>(d: usize, resolution: usize, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        if resolution < 2 {
            return Err(Error::invalid("grid resolution must be >= 2"));
        }
        let total = resolution.pow(d as u32);
        let template = ImageGrid {
            dimension: d,
            resolution,
            values: Vec::new(),
            mask: Vec::new(),
        };
        let (values, mask): (Vec<f64>, Vec<bool>) = (0..total)
            .into_par_iter()
            .map(|idx| {
                let x = template.point(idx);
                if crate::dot(&x, &x) <= 1.0 {
                    (f(&x), true)
                } else {
                    (0.0, false)
                }
            })
            .unzip();
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { point: template.point(i) });
        }
        Ok(ImageGrid {
            values,
            mask,
            ..template
        })
    }

    pub fn zeros_like(&self) -> Self {
        ImageGrid {
            values: vec![0.0; self.values.len()],
            ..self.clone()
        }
    }

    fn check_compatible(&self, other: &ImageGrid) -> Result<()> {
        if self.dimension != other.dimension || self.resolution != other.resolution {
            return Err(Error::GeometryMismatch(format!(
                "grids {}^{} and {}^{} differ",
                self.resolution, self.dimension, other.resolution, other.dimension
            )));
        }
        Ok(())
    }

    /// Masked error norms of `self` against the reference `reference`.
    pub fn metrics(&self, reference: &ImageGrid) -> Result<GridMetrics> {
        self.check_compatible(reference)?;
        let (mut sq, mut ref_sq, mut linf, mut count) = (0.0, 0.0, 0.0f64, 0usize);
        for i in 0..self.values.len() {
            if !self.mask[i] {
                continue;
            }
            let e = self.values[i] - reference.values[i];
            sq += e * e;
            ref_sq += reference.values[i] * reference.values[i];
            linf = linf.max(e.abs());
            count += 1;
        }
        let relative_l2 = if ref_sq > 0.0 {
            (sq / ref_sq).sqrt()
        } else if sq == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        Ok(GridMetrics {
            l2: (sq / count.max(1) as f64).sqrt(),
            relative_l2,
            linf,
        })
    }

    pub fn max_abs_diff(&self, other: &ImageGrid) -> Result<f64> {
        Ok(self.metrics(other)?.linf)
    }

    /// Writes the little-endian `f32` payload and its JSON sidecar
    /// (`<path>.json`).
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut bytes = Vec::with_capacity(self.values.len() * 4);
        for &v in &self.values {
            bytes.extend_from_slice(&(v as f32).to_le_bytes());
        }
        fs::write(path, bytes)?;
        let sidecar = GridSidecar {
            d: self.dimension,
            resolution: self.resolution,
            extent: [-1.0, 1.0],
            order: "row-major".into(),
            dtype: "f32le".into(),
        };
        fs::write(sidecar_path(path), serde_json::to_string_pretty(&sidecar)?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let sidecar: GridSidecar = serde_json::from_str(&fs::read_to_string(sidecar_path(path))?)?;
        if sidecar.order != "row-major" || sidecar.extent != [-1.0, 1.0] {
            return Err(Error::Format("unsupported grid layout".into()));
        }
        let bytes = fs::read(path)?;
        let total = sidecar
            .resolution
            .checked_pow(sidecar.d as u32)
            .ok_or_else(|| Error::Format("grid too large".into()))?;
        if bytes.len() != total * 4 {
            return Err(Error::Format(format!(
                "grid payload has {} bytes, expected {}",
                bytes.len(),
                total * 4
            )));
        }
        let values: Vec<f64> = bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
            .collect();
        let mut grid = ImageGrid {
            dimension: sidecar.d,
            resolution: sidecar.resolution,
            values,
            mask: Vec::new(),
        };
        grid.mask = (0..total)
            .map(|i| {
                let x = grid.point(i);
                crate::dot(&x, &x) <= 1.0
            })
            .collect();
        if grid.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Format("grid contains non-finite values".into()));
        }
        Ok(grid)
    }

    /// 8-bit binary PGM with linear min-max windowing over the masked
    /// points. For `d = 3` the central `x1` slice is exported. Rows run
    /// from the first axis's largest coordinate down.
    pub fn write_pgm(&self, path: &Path) -> Result<()> {
        let n = self.resolution;
        let offset = if self.dimension == 3 { (n / 2) * n * n } else { 0 };
        let slice = &self.values[offset..offset + n * n];
        let smask = &self.mask[offset..offset + n * n];
        let (lo, hi) = slice
            .iter()
            .zip(smask)
            .filter(|(_, &m)| m)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (&v, _)| (lo.min(v), hi.max(v)));
        let span = if hi > lo { hi - lo } else { 1.0 };
        let mut out = Vec::with_capacity(n * n + 32);
        write!(out, "P5\n{n} {n}\n255\n")?;
        for row in (0..n).rev() {
            for col in 0..n {
                let i = row * n + col;
                let v = if smask[i] { (slice[i] - lo) / span } else { 0.0 };
                out.push((v.clamp(0.0, 1.0) * 255.0).round() as u8);
            }
        }
        fs::write(path, out)?;
        Ok(())
    }
}

pub fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    s.into()
}
