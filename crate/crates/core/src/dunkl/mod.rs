//! The one-dimensional Dunkl derivative `D = d/dx + (mu/x)(1 - R)` on a
//! symmetric grid, and the Dunkl-Fokker-Planck operator built from it.
//!
//! Every `1/x` factor is applied to an odd sequence only, so the origin value
//! is a finite limit that is filled in by even extrapolation.

pub mod grid;
mod inner;
pub(crate) mod stencil;

use alloc::vec::Vec;

pub use grid::{AnalyticForm, GridFunction, GridSpec, Parity, Sector, MIN_GRID_POINTS};
pub use inner::{
    analytic_inner_product, weighted_inner_product, weighted_norm, InnerProduct,
    TruncationWarning, TRUNCATION_THRESHOLD,
};
pub(crate) use inner::{half_grid_weights, integrate_even_part};

use crate::drift::DriftSpec;
use crate::error::{Error, Result};
use stencil::{divide_odd_by_x, fill_origin_limit, first_derivative, second_derivative};

/// The deformation parameter `mu`, restricted to `mu > -1/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DunklParams {
    mu: f64,
}

impl DunklParams {
    pub fn new(mu: f64) -> Result<Self> {
        if !(mu.is_finite() && mu > -0.5) {
            return Err(Error::InvalidParameter {
                name: "mu",
                value: mu,
                reason: "the Dunkl parameter must satisfy mu > -1/2",
            });
        }
        Ok(Self { mu })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }
}

/// `(R f)(x) = f(-x)`, an exact index mirror.
pub fn reflect(f: &GridFunction) -> GridFunction {
    let mut values = f.values().to_vec();
    values.reverse();
    let reflected = GridFunction::from_parts(*f.grid(), values, f.parity());
    match f.analytic() {
        Some(form) if f.parity() == Parity::Odd => {
            GridFunction::from_analytic(*f.grid(), form.clone().scaled(-1.0))
        }
        Some(form) => GridFunction::from_analytic(*f.grid(), form.clone()),
        None => reflected,
    }
}

fn dunkl_derivative_values(f: &GridFunction, mu: f64) -> Vec<f64> {
    let grid = f.grid();
    let mut d = first_derivative(f.values(), grid.spacing());
    if mu != 0.0 {
        let quotient = divide_odd_by_x(&f.odd_values(), &grid.nodes(), grid.center());
        for (dj, qj) in d.iter_mut().zip(&quotient) {
            *dj += 2.0 * mu * qj;
        }
    }
    d
}

/// `D f = f' + (mu/x)(f - R f) = f' + 2 mu f_odd / x`.
pub fn dunkl_derivative(f: &GridFunction, p: DunklParams) -> GridFunction {
    let d = dunkl_derivative_values(f, p.mu());
    GridFunction::from_parts(*f.grid(), d, f.parity().flipped())
}

/// `D^2 f = f'' + (2 mu/x) f' - (mu/x^2)(1 - R) f`, evaluated as
/// `f'' + 2 mu (f_even' / x) + 2 mu (f_odd / x)'` so that only odd sequences
/// are divided by `x`.
pub fn dunkl_second_derivative(f: &GridFunction, p: DunklParams) -> GridFunction {
    let grid = f.grid();
    let h = grid.spacing();
    let mu = p.mu();
    let mut d2 = second_derivative(f.values(), h);
    if mu != 0.0 {
        let nodes = grid.nodes();
        let c = grid.center();
        let even_slope = first_derivative(&f.even_values(), h);
        let odd_slope = odd_projection(&even_slope);
        let from_even = divide_odd_by_x(&odd_slope, &nodes, c);
        let quotient = divide_odd_by_x(&f.odd_values(), &nodes, c);
        let from_odd = first_derivative(&quotient, h);
        for j in 0..d2.len() {
            d2[j] += 2.0 * mu * (from_even[j] + from_odd[j]);
        }
    }
    GridFunction::from_parts(*grid, d2, f.parity())
}

/// The Dunkl-Fokker-Planck operator `-D^2 f + 2 D (w f)`.
///
/// Expanded, this is `-f'' - (2mu/x) f' + (mu/x^2)(1-R) f + 2w'f + 2wf'
/// + (2mu/x) w f - (2mu/x)(Rw)(Rf)`; the reflected product is handled as the
/// odd part of `w f`. Nodes where `w` is singular take the limit of `w f`.
pub fn apply_dfp_operator(f: &GridFunction, w: &DriftSpec, p: DunklParams) -> Result<GridFunction> {
    let grid = f.grid();
    let c = grid.center();
    let mut wf = Vec::with_capacity(f.len());
    for (j, v) in f.values().iter().enumerate() {
        let x = grid.x(j);
        let wx = w.eval(x);
        if !wx.is_finite() && j != c {
            return Err(Error::Singularity { x });
        }
        wf.push(wx * v);
    }
    if !wf[c].is_finite() || w.singular_at_zero() {
        fill_origin_limit(&mut wf, c);
    }
    let wf = GridFunction::from_parts(*grid, wf, Parity::None);
    let drift = dunkl_derivative_values(&wf, p.mu());
    let diffusion = dunkl_second_derivative(f, p);
    let values = diffusion
        .values()
        .iter()
        .zip(&drift)
        .map(|(d2, d)| 2.0 * d - d2)
        .collect();
    let parity = if w.is_odd() { f.parity() } else { Parity::None };
    Ok(GridFunction::from_parts(*grid, values, parity))
}

fn odd_projection(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    (0..n).map(|j| 0.5 * (v[j] - v[n - 1 - j])).collect()
}
