//! Classical orthogonal polynomials, ball/sphere constants and Gauss rules.
//!
//! Every quadrature rule is stored *normalized*: the weights sum to one and
//! integrate against `c * w(t) dt`, where `c` is the reciprocal of the total
//! mass of the weight `w`. Callers that need the raw integral multiply back
//! by the mass.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

const NEWTON_TOL: f64 = 1e-14;
const NEWTON_MAX_ITER: usize = 100;

/// Shifted factorial `(a)_k = a (a+1) ... (a+k-1)`.
pub fn pochhammer(a: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (a + i as f64))
}

/// `Gamma(x)` for `x` a positive integer or half-integer, computed exactly
/// by the recurrence from `Gamma(1) = 1` and `Gamma(1/2) = sqrt(pi)`.
fn gamma_half_integer(x: f64) -> f64 {
    let twice = (2.0 * x).round();
    debug_assert!((2.0 * x - twice).abs() < 1e-12 && twice >= 1.0);
    let (mut acc, mut y) = if twice as i64 % 2 == 0 {
        (1.0, 1.0)
    } else {
        (PI.sqrt(), 0.5)
    };
    while y < x - 0.25 {
        acc *= y;
        y += 1.0;
    }
    acc
}

/// Surface area of the unit sphere `S^{d-1}`.
pub fn sphere_area(d: usize) -> f64 {
    2.0 * PI.powf(d as f64 / 2.0) / gamma_half_integer(d as f64 / 2.0)
}

/// Volume of the unit ball `B^d`.
pub fn ball_volume(d: usize) -> f64 {
    if d == 0 {
        return 1.0;
    }
    sphere_area(d) / d as f64
}

/// Reciprocal mass of the Gegenbauer weight `(1-t^2)^(lambda-1/2)` on `[-1,1]`,
/// i.e. `Gamma(lambda+1) / (Gamma(1/2) Gamma(lambda+1/2))`.
pub fn gegenbauer_normalizer(lambda: f64) -> f64 {
    let twice = 2.0 * lambda;
    if (twice - twice.round()).abs() < 1e-12 && twice.round() >= 1.0 {
        gamma_half_integer(lambda + 1.0)
            / (PI.sqrt() * gamma_half_integer(lambda + 0.5))
    } else {
        (ln_gamma(lambda + 1.0) - 0.5 * PI.ln() - ln_gamma(lambda + 0.5)).exp()
    }
}

/// Geometric constants attached to a dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallConstants {
    pub dimension: usize,
    pub sphere_area: f64,
    pub ball_volume: f64,
}

impl BallConstants {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::invalid(format!("dimension must be >= 2, got {d}")));
        }
        Ok(Self {
            dimension: d,
            sphere_area: sphere_area(d),
            ball_volume: ball_volume(d),
        })
    }

    /// `lambda = d/2`, the Gegenbauer index attached to the ball.
    pub fn lambda(&self) -> f64 {
        self.dimension as f64 / 2.0
    }

    /// Volume of the unit ball one dimension down, `b_{d-1}`.
    pub fn slice_volume(&self) -> f64 {
        ball_volume(self.dimension - 1)
    }

    pub fn gegenbauer_normalizer(&self, lambda: f64) -> f64 {
        gegenbauer_normalizer(lambda)
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::invalid(format!(
            "Gegenbauer index must be > 0, got {lambda}"
        )));
    }
    Ok(())
}

/// Fills `out[k] = C_k^lambda(t)` for `k < out.len()` by the three-term
/// recurrence. No validation; `lambda > 0` is assumed.
#[inline]
pub fn gegenbauer_fill(lambda: f64, t: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() == 1 {
        return;
    }
    out[1] = 2.0 * lambda * t;
    for k in 1..out.len() - 1 {
        let kf = k as f64;
        out[k + 1] = (2.0 * (kf + lambda) * t * out[k]
            - (kf + 2.0 * lambda - 1.0) * out[k - 1])
            / (kf + 1.0);
    }
}

/// `C_0^lambda(t), ..., C_n^lambda(t)`.
pub fn gegenbauer_all(lambda: f64, n: usize, t: f64) -> Result<Vec<f64>> {
    check_lambda(lambda)?;
    let mut out = vec![0.0; n + 1];
    gegenbauer_fill(lambda, t, &mut out);
    Ok(out)
}

/// `C_n^lambda(t)`.
pub fn gegenbauer(lambda: f64, n: usize, t: f64) -> Result<f64> {
    Ok(*gegenbauer_all(lambda, n, t)?.last().unwrap())
}

/// `C_n^lambda(1) = (2 lambda)_n / n!`.
pub fn gegenbauer_at_one(lambda: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |acc, i| acc * (2.0 * lambda + i as f64) / (i as f64 + 1.0))
}

/// `h_k^(lambda) = lambda (2 lambda)_k / ((k + lambda) k!)`, the squared norm
/// of `C_k^lambda` under the normalized weight.
pub fn gegenbauer_norm(lambda: f64, k: usize) -> f64 {
    lambda / (k as f64 + lambda) * gegenbauer_at_one(lambda, k)
}

/// Chebyshev polynomial of the second kind `U_n(t)`.
pub fn chebyshev_u(n: usize, t: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for _ in 0..n {
        let next = 2.0 * t * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Chebyshev polynomial of the first kind `T_n(t)`.
pub fn chebyshev_t(n: usize, t: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let (mut prev, mut cur) = (1.0, t);
    for _ in 1..n {
        let next = 2.0 * t * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn check_jacobi(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha > -1.0 && beta > -1.0) {
        return Err(Error::invalid(format!(
            "Jacobi parameters must exceed -1, got ({alpha}, {beta})"
        )));
    }
    Ok(())
}

/// Standard Jacobi polynomial `P_n^(alpha,beta)(t)`.
pub fn jacobi(alpha: f64, beta: f64, n: usize, t: f64) -> Result<f64> {
    check_jacobi(alpha, beta)?;
    Ok(jacobi_unchecked(alpha, beta, n, t))
}

pub(crate) fn jacobi_unchecked(alpha: f64, beta: f64, n: usize, t: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let ab = alpha + beta;
    let mut prev = 1.0;
    let mut cur = (alpha + 1.0) + (ab + 2.0) * (t - 1.0) / 2.0;
    for k in 2..=n {
        let kf = k as f64;
        let c = 2.0 * kf + ab;
        let a1 = 2.0 * kf * (kf + ab) * (c - 2.0);
        let a2 = (c - 1.0) * (c * (c - 2.0) * t + alpha * alpha - beta * beta);
        let a3 = 2.0 * (kf + alpha - 1.0) * (kf + beta - 1.0) * c;
        let next = (a2 * cur - a3 * prev) / a1;
        prev = cur;
        cur = next;
    }
    cur
}

/// `h_n^(alpha,beta)`: squared norm of `P_n^(alpha,beta)` under the
/// normalized Jacobi weight.
pub fn jacobi_norm(alpha: f64, beta: f64, n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let ab = alpha + beta;
    let ratio = (0..n).fold(1.0, |acc, i| {
        let i = i as f64;
        acc * (alpha + 1.0 + i) * (beta + 1.0 + i) / ((i + 1.0) * (ab + 2.0 + i))
    });
    let nf = n as f64;
    ratio * (ab + nf + 1.0) / (ab + 2.0 * nf + 1.0)
}

/// Orthonormal Jacobi polynomial `p_n = h_n^{-1/2} P_n`.
pub fn jacobi_orthonormal(alpha: f64, beta: f64, n: usize, t: f64) -> Result<f64> {
    check_jacobi(alpha, beta)?;
    Ok(jacobi_unchecked(alpha, beta, n, t) / jacobi_norm(alpha, beta, n).sqrt())
}

/// A normalized Gauss-type rule on `(-1, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Exponent of `(1 - t)` in the weight.
    pub alpha: f64,
    /// Exponent of `(1 + t)` in the weight.
    pub beta: f64,
    pub exact_degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Exponent `alpha` of a symmetric weight `(1 - t^2)^alpha`.
    pub fn weight_exponent(&self) -> f64 {
        self.alpha
    }

    /// Normalized integral `sum_j w_j f(t_j)`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }
}

/// Monic recurrence coefficients `(a_k, b_k)` of the Jacobi weight:
/// `pi_{k+1} = (t - a_k) pi_k - b_k pi_{k-1}`.
fn jacobi_recurrence(alpha: f64, beta: f64, k: usize) -> (f64, f64) {
    let ab = alpha + beta;
    let kf = k as f64;
    let a = if k == 0 {
        (beta - alpha) / (ab + 2.0)
    } else {
        (beta * beta - alpha * alpha) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
    };
    let b = match k {
        0 => 1.0,
        1 => 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab)),
        _ => {
            let c = 2.0 * kf + ab;
            4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab) / (c * c * (c + 1.0) * (c - 1.0))
        }
    };
    (a, b)
}

/// Orthonormal values `p_0(t), ..., p_{n-1}(t)` together with `p_n(t)` and
/// `p_n'(t)` for the normalized Jacobi weight.
fn orthonormal_with_derivative(
    coeffs: &[(f64, f64)],
    n: usize,
    t: f64,
    squares: Option<&mut f64>,
) -> (f64, f64) {
    let (mut p_prev, mut p) = (0.0, 1.0);
    let (mut d_prev, mut d) = (0.0, 0.0);
    let mut sum_sq = 0.0;
    for k in 0..n {
        sum_sq += p * p;
        let (a, b) = coeffs[k];
        let sb = if k == 0 { 0.0 } else { b.sqrt() };
        let sb_next = coeffs[k + 1].1.sqrt();
        let p_next = ((t - a) * p - sb * p_prev) / sb_next;
        let d_next = (p + (t - a) * d - sb * d_prev) / sb_next;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
    }
    if let Some(s) = squares {
        *s = sum_sq;
    }
    (p, d)
}

/// Gauss-Jacobi rule with `npoints` nodes for the weight
/// `(1-t)^alpha (1+t)^beta`, normalized so the weights sum to one.
///
/// Nodes come from deflated Newton iteration on the orthonormal recurrence,
/// seeded by the usual cosine-angle asymptotics; weights from the
/// Christoffel function.
pub fn gauss_jacobi_rule(alpha: f64, beta: f64, npoints: usize) -> Result<QuadratureRule> {
    check_jacobi(alpha, beta)?;
    if npoints == 0 {
        return Err(Error::invalid("a quadrature rule needs at least one node"));
    }
    let n = npoints;
    let coeffs: Vec<(f64, f64)> = (0..=n).map(|k| jacobi_recurrence(alpha, beta, k)).collect();
    let denom = n as f64 + (alpha + beta + 1.0) / 2.0;
    let mut roots: Vec<f64> = Vec::with_capacity(n);
    for i in 1..=n {
        let theta = (i as f64 + alpha / 2.0 - 0.25) * PI / denom;
        let mut t = theta.cos();
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITER {
            let (p, dp) = orthonormal_with_derivative(&coeffs, n, t, None);
            let deflate: f64 = roots.iter().map(|&r| 1.0 / (t - r)).sum();
            let step = p / (dp - p * deflate);
            t -= step;
            if !t.is_finite() {
                break;
            }
            if step.abs() <= NEWTON_TOL * t.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Convergence { degree: n });
        }
        roots.push(t);
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let ordered = roots.windows(2).all(|w| w[0] < w[1]);
    if !ordered || roots[0] <= -1.0 || roots[n - 1] >= 1.0 {
        return Err(Error::Convergence { degree: n });
    }
    if alpha == beta {
        for i in 0..n / 2 {
            let s = 0.5 * (roots[n - 1 - i] - roots[i]);
            roots[i] = -s;
            roots[n - 1 - i] = s;
        }
        if n % 2 == 1 {
            roots[n / 2] = 0.0;
        }
    }
    let weights: Vec<f64> = roots
        .iter()
        .map(|&t| {
            let mut s = 0.0;
            orthonormal_with_derivative(&coeffs, n, t, Some(&mut s));
            1.0 / s
        })
        .collect();
    Ok(QuadratureRule {
        nodes: roots,
        weights,
        alpha,
        beta,
        exact_degree: 2 * n - 1,
    })
}

/// Gauss rule for `(1 - t^2)^alpha`, nodes at the zeros of
/// `C_npoints^{alpha + 1/2}`. The Chebyshev cases `alpha = -1/2` and
/// `alpha = 1/2` use their closed forms.
pub fn gauss_gegenbauer_rule(alpha: f64, npoints: usize) -> Result<QuadratureRule> {
    if !(alpha >= -0.5) {
        return Err(Error::invalid(format!(
            "weight exponent must be >= -1/2, got {alpha}"
        )));
    }
    if npoints == 0 {
        return Err(Error::invalid("a quadrature rule needs at least one node"));
    }
    if alpha == -0.5 {
        return Ok(gauss_chebyshev_first(npoints));
    }
    if alpha == 0.5 {
        return Ok(gauss_chebyshev_second(npoints));
    }
    gauss_jacobi_rule(alpha, alpha, npoints)
}

/// Gauss-Legendre rule normalized against `dt / 2`.
pub fn gauss_legendre_rule(npoints: usize) -> Result<QuadratureRule> {
    gauss_gegenbauer_rule(0.0, npoints)
}

/// Gauss-Chebyshev rule of the first kind: nodes `cos((j + 1/2) pi / n)`,
/// equal weights `1/n`. Returned in increasing node order.
pub fn gauss_chebyshev_first(n: usize) -> QuadratureRule {
    let nodes: Vec<f64> = (0..n)
        .rev()
        .map(|j| ((j as f64 + 0.5) * PI / n as f64).cos())
        .collect();
    QuadratureRule {
        nodes,
        weights: vec![1.0 / n as f64; n],
        alpha: -0.5,
        beta: -0.5,
        exact_degree: 2 * n - 1,
    }
}

/// Gauss-Chebyshev rule of the second kind: nodes `cos(j pi / (n+1))`,
/// weights `2 sin^2(j pi / (n+1)) / (n+1)`, `j = 1..n`.
pub fn gauss_chebyshev_second(n: usize) -> QuadratureRule {
    let h = PI / (n as f64 + 1.0);
    let (nodes, weights) = (1..=n)
        .rev()
        .map(|j| {
            let theta = j as f64 * h;
            (theta.cos(), 2.0 * theta.sin().powi(2) / (n as f64 + 1.0))
        })
        .unzip();
    QuadratureRule {
        nodes,
        weights,
        alpha: 0.5,
        beta: 0.5,
        exact_degree: 2 * n - 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Normalized moment of `(1-t^2)^alpha`, computed from the Beta function.
    fn moment(alpha: f64, p: usize) -> f64 {
        if p % 2 == 1 {
            return 0.0;
        }
        (0..p / 2).fold(1.0, |acc, i| acc * (i as f64 + 0.5) / (i as f64 + alpha + 1.5))
    }

    #[test]
    fn constants_for_low_dimensions() {
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((ball_volume(2) - PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((ball_volume(1) - 2.0).abs() < 1e-15);
        // b_{d-1} / b_d equals the Gegenbauer normalizer at d/2
        for d in 2..7 {
            let c = gegenbauer_normalizer(d as f64 / 2.0);
            assert!((c - ball_volume(d - 1) / ball_volume(d)).abs() < 1e-14, "d={d}");
        }
        let generic = gegenbauer_normalizer(0.7);
        let rule = gauss_gegenbauer_rule(0.2, 1).unwrap();
        assert!((rule.weights[0] - 1.0).abs() < 1e-15);
        assert!(generic > 0.0);
    }

    #[test]
    fn gegenbauer_examples() {
        assert_eq!(gegenbauer_all(1.0, 0, 0.37).unwrap(), vec![1.0]);
        let u = gegenbauer_all(1.0, 3, 0.5).unwrap();
        assert!((u[3] + 1.0).abs() < 1e-15);
        let c = gegenbauer_all(1.0, 3, 1.0).unwrap();
        assert!((c[3] - 4.0).abs() < 1e-15);
        assert!(gegenbauer_all(0.0, 3, 0.1).is_err());
        assert!(gegenbauer_all(-1.0, 3, 0.1).is_err());
        for lambda in [0.5, 1.0, 1.5, 2.5] {
            for n in 0..12 {
                let v = gegenbauer(lambda, n, 1.0).unwrap();
                assert!((v - gegenbauer_at_one(lambda, n)).abs() < 1e-10 * v.abs().max(1.0));
            }
        }
    }

    #[test]
    fn chebyshev_closed_forms() {
        assert!((chebyshev_t(5, 0.3f64.cos()) - 1.5f64.cos()).abs() < 1e-14);
        for t in [-1.0, -0.3, 0.0, 0.8] {
            assert_eq!(chebyshev_u(0, t), 1.0);
        }
        let theta = 0.9f64.acos();
        let expected = (5.0 * theta).sin() / theta.sin();
        assert!((chebyshev_u(4, 0.9) - expected).abs() < 1e-13);
        for i in 0..50 {
            let t = -0.99 + 1.98 * i as f64 / 49.0;
            let th = t.acos();
            for n in 0..20 {
                let cu = gegenbauer(1.0, n, t).unwrap();
                assert!((chebyshev_u(n, t) - cu).abs() < 1e-13);
                assert!((chebyshev_t(n, t) - (n as f64 * th).cos()).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn jacobi_examples() {
        for n in 0..8 {
            let beta = 1.5;
            let at_one = jacobi_orthonormal(0.0, beta, n, 1.0).unwrap();
            assert!((at_one - jacobi_norm(0.0, beta, n).powf(-0.5)).abs() < 1e-12);
        }
        assert_eq!(jacobi_orthonormal(0.3, 0.7, 0, 0.2).unwrap(), 1.0);
        assert!(jacobi_orthonormal(-1.0, 0.0, 2, 0.0).is_err());
        let rule = gauss_jacobi_rule(0.0, 1.5, 6).unwrap();
        let s = rule.integrate(|t| {
            jacobi_orthonormal(0.0, 1.5, 2, t).unwrap() * jacobi_orthonormal(0.0, 1.5, 3, t).unwrap()
        });
        assert!(s.abs() < 1e-12);
    }

    #[test]
    fn jacobi_gram_is_identity() {
        for (alpha, beta) in [(0.0, 0.0), (0.0, 0.5), (0.0, 2.5), (1.0, 0.0), (-0.5, 3.0)] {
            let rule = gauss_jacobi_rule(alpha, beta, 10).unwrap();
            for i in 0..=8 {
                for j in 0..=8 {
                    let g = rule.integrate(|t| {
                        jacobi_orthonormal(alpha, beta, i, t).unwrap()
                            * jacobi_orthonormal(alpha, beta, j, t).unwrap()
                    });
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((g - want).abs() < 1e-10, "({alpha},{beta}) i={i} j={j} g={g}");
                }
            }
        }
    }

    #[test]
    fn gegenbauer_norm_examples() {
        assert_eq!(gegenbauer_norm(0.7, 0), 1.0);
        assert!((gegenbauer_norm(1.0, 2) - 1.0).abs() < 1e-15);
        assert!((gegenbauer_norm(1.5, 1) - 9.0 / 5.0).abs() < 1e-15);
        // cross-check U_k^2 under (2/pi) sqrt(1-t^2)
        let rule = gauss_chebyshev_second(12);
        for k in 0..6 {
            let s = rule.integrate(|t| chebyshev_u(k, t).powi(2));
            assert!((s - gegenbauer_norm(1.0, k)).abs() < 1e-13);
        }
    }

    #[test]
    fn rule_examples() {
        let r = gauss_gegenbauer_rule(0.5, 2).unwrap();
        assert!((r.nodes[0] + 0.5).abs() < 1e-15 && (r.nodes[1] - 0.5).abs() < 1e-15);
        assert!((r.weights[0] - 0.5).abs() < 1e-15 && (r.weights[1] - 0.5).abs() < 1e-15);

        let m = 3;
        let r = gauss_gegenbauer_rule(-0.5, 2 * m + 1).unwrap();
        let mut expect: Vec<f64> = (0..=2 * m)
            .map(|j| ((j as f64 + 0.5) * PI / (2 * m + 1) as f64).cos())
            .collect();
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in r.nodes.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(r.weights.iter().all(|&w| (w - 1.0 / 7.0).abs() < 1e-15));

        let r = gauss_gegenbauer_rule(1.0, 4).unwrap();
        assert!((r.integrate(|t| t * t) - 0.2).abs() < 1e-12);

        let r = gauss_legendre_rule(1).unwrap();
        assert_eq!(r.nodes, vec![0.0]);
        assert!((r.weights[0] - 1.0).abs() < 1e-15);
        let r = gauss_legendre_rule(2).unwrap();
        assert!((r.nodes[1] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((r.weights[0] - 0.5).abs() < 1e-15);
        let r = gauss_legendre_rule(5).unwrap();
        assert!((r.integrate(|t| t.powi(4)) - 0.2).abs() < 1e-13);
        assert!(gauss_legendre_rule(0).is_err());
        assert!(gauss_gegenbauer_rule(-0.7, 3).is_err());
    }

    #[test]
    fn rules_match_moments() {
        for alpha in [-0.5, 0.0, 0.5, 1.0, 1.5] {
            for n in [1usize, 2, 3, 7, 16, 40, 101] {
                let rule = gauss_gegenbauer_rule(alpha, n).unwrap();
                assert_eq!(rule.exact_degree, 2 * n - 1);
                assert!((rule.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                assert!(rule.weights.iter().all(|&w| w > 0.0));
                assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
                for p in 0..=rule.exact_degree.min(60) {
                    let s = rule.integrate(|t| t.powi(p as i32));
                    assert!((s - moment(alpha, p)).abs() < 1e-10, "alpha={alpha} n={n} p={p}");
                }
            }
        }
    }

    #[test]
    fn large_rules_converge() {
        for alpha in [0.0, 1.0] {
            let rule = gauss_gegenbauer_rule(alpha, 1000).unwrap();
            assert!((rule.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!((rule.integrate(|t| t * t) - moment(alpha, 2)).abs() < 1e-12);
        }
    }
}
