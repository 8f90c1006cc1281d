//! The reflection-invariant scalar product `<f|g> = int f g |x|^{2 mu} dx`.

use alloc::vec;
use alloc::vec::Vec;

use super::grid::{AnalyticForm, GridFunction, GridSpec, Parity};
use super::DunklParams;
use crate::error::{Error, Result};
use crate::math::{abs_pow, powf};
use crate::special_fn::{halfline_quadrature, GaussLegendre};

/// Relative boundary magnitude above which truncation to `[-L, L]` is flagged.
pub const TRUNCATION_THRESHOLD: f64 = 1e-12;

/// Result of a weighted inner product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerProduct {
    pub value: f64,
    pub truncation: Option<TruncationWarning>,
}

/// One of the factors has not decayed at `x = +-L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationWarning {
    /// Largest `|f(+-L)| / max|f|` over both factors.
    pub boundary_ratio: f64,
}

/// Weighted inner product of two grid functions.
///
/// Opposite parities give exactly zero. When both factors carry an
/// [`AnalyticForm`] the integral is done in `u = x^2` with a Gauss-Laguerre
/// rule and is exact; otherwise the even part of `f g` is integrated on the
/// half grid with Simpson-type weights that treat `|x|^{2 mu}` exactly.
pub fn weighted_inner_product(
    f: &GridFunction,
    g: &GridFunction,
    p: DunklParams,
) -> Result<InnerProduct> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch);
    }
    let truncation = truncation_warning(f).or(truncation_warning(g));
    if f.parity().times(g.parity()) == Parity::Odd {
        return Ok(InnerProduct {
            value: 0.0,
            truncation,
        });
    }
    let value = match (f.analytic(), g.analytic()) {
        (Some(a), Some(b)) => analytic_inner_product(a, b, p.mu())?,
        _ => {
            let weights = half_grid_weights(f.grid(), p.mu())?;
            integrate_even_part(f.values(), g.values(), f.grid(), &weights)
        }
    };
    Ok(InnerProduct { value, truncation })
}

/// `sqrt(<f|f>)`, ignoring truncation warnings.
pub fn weighted_norm(f: &GridFunction, p: DunklParams) -> Result<f64> {
    Ok(crate::math::sqrt(weighted_inner_product(f, f, p)?.value.max(0.0)))
}

fn truncation_warning(f: &GridFunction) -> Option<TruncationWarning> {
    let scale = f.max_abs();
    if scale == 0.0 {
        return None;
    }
    let v = f.values();
    let ratio = v[0].abs().max(v[v.len() - 1].abs()) / scale;
    (ratio > TRUNCATION_THRESHOLD).then_some(TruncationWarning {
        boundary_ratio: ratio,
    })
}

/// Exact weighted product of two closed forms.
pub fn analytic_inner_product(a: &AnalyticForm, b: &AnalyticForm, mu: f64) -> Result<f64> {
    if a.odd != b.odd {
        return Ok(0.0);
    }
    // 2 int_0^inf x^P e^{-r x^2} Q(x^2) dx = int_0^inf u^beta e^{-r u} Q(u) du
    let beta = 0.5 * (a.power + b.power + 2.0 * mu - 1.0);
    if beta <= -1.0 {
        return Err(Error::Divergence("weighted product near the origin"));
    }
    let rate = a.gauss_rate + b.gauss_rate;
    if rate <= 0.0 {
        return Err(Error::Divergence("weighted product at infinity"));
    }
    let mut q = vec![0.0; a.poly.len() + b.poly.len() - 1];
    for (i, ca) in a.poly.iter().enumerate() {
        for (j, cb) in b.poly.iter().enumerate() {
            q[i + j] += ca * cb;
        }
    }
    let nodes = q.len() / 2 + 1;
    let poly = |u: f64| q.iter().rev().fold(0.0, |acc, c| acc * u + c);
    let integral = halfline_quadrature(|t| poly(t / rate), beta, nodes)?;
    Ok(a.scale * b.scale * integral / powf(rate, beta + 1.0))
}

/// Quadrature weights on the half grid `x_0 = 0, ..., x_M = L` for
/// `int_0^L F(x) |x|^{2 mu} dx`, exact for piecewise quadratic `F`
/// (a cubic end panel is used when `M` is odd).
pub(crate) fn half_grid_weights(grid: &GridSpec, mu: f64) -> Result<Vec<f64>> {
    let m = grid.center();
    let h = grid.spacing();
    let rule = GaussLegendre::new(10)?;
    let mut weights = vec![0.0; m + 1];
    let mut start = 0;
    while start < m {
        let width = if m - start == 3 { 3 } else { 2 };
        let panel = panel_weights(start, width, h, mu, &rule);
        for (i, w) in panel.iter().enumerate() {
            weights[start + i] += w;
        }
        start += width;
    }
    Ok(weights)
}

// Weights `int x^{2 mu} l_i(x) dx` for the Lagrange basis on `width + 1` nodes.
fn panel_weights(start: usize, width: usize, h: f64, mu: f64, rule: &GaussLegendre) -> Vec<f64> {
    let nodes: Vec<f64> = (0..=width).map(|i| (start + i) as f64).collect();
    let lagrange = |i: usize, s: f64| {
        nodes
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .fold(1.0, |acc, (_, &t)| acc * (s - t) / (nodes[i] - t))
    };
    let exponent = 2.0 * mu;
    if start == 0 {
        // exact monomial moments in s = x / h on [0, width]
        let coeffs = lagrange_monomials(&nodes);
        let top = width as f64;
        coeffs
            .iter()
            .map(|c| {
                let integral: f64 = c
                    .iter()
                    .enumerate()
                    .map(|(k, ck)| ck * powf(top, exponent + k as f64 + 1.0) / (exponent + k as f64 + 1.0))
                    .sum();
                integral * powf(h, exponent + 1.0)
            })
            .collect()
    } else {
        (0..=width)
            .map(|i| {
                rule.integrate(
                    |s| abs_pow(s, exponent) * lagrange(i, s),
                    start as f64,
                    (start + width) as f64,
                ) * powf(h, exponent + 1.0)
            })
            .collect()
    }
}

fn lagrange_monomials(nodes: &[f64]) -> Vec<Vec<f64>> {
    (0..nodes.len())
        .map(|i| {
            let mut poly = vec![1.0];
            let mut denom = 1.0;
            for (k, &t) in nodes.iter().enumerate() {
                if k == i {
                    continue;
                }
                let mut next = vec![0.0; poly.len() + 1];
                for (d, c) in poly.iter().enumerate() {
                    next[d + 1] += c;
                    next[d] -= t * c;
                }
                poly = next;
                denom *= nodes[i] - t;
            }
            poly.iter().map(|c| c / denom).collect()
        })
        .collect()
}

/// `int_{-L}^{L} f g |x|^{2 mu} dx` using half-grid weights.
pub(crate) fn integrate_even_part(f: &[f64], g: &[f64], grid: &GridSpec, weights: &[f64]) -> f64 {
    let c = grid.center();
    weights
        .iter()
        .enumerate()
        .map(|(k, w)| w * (f[c + k] * g[c + k] + f[c - k] * g[c - k]))
        .sum()
}
