use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{abs_pow, exp};

/// Smallest grid the differentiation stencils can work with.
pub const MIN_GRID_POINTS: usize = 9;

/// Symmetric uniform grid on `[-L, L]` with an odd number of nodes, so that
/// `x = 0` is a node and reflection is an exact index mirror.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    half_length: f64,
    n_points: usize,
}

impl GridSpec {
    pub fn new(half_length: f64, n_points: usize) -> Result<Self> {
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(Error::InvalidParameter {
                name: "half_length",
                value: half_length,
                reason: "domain half-length must be positive",
            });
        }
        if n_points % 2 == 0 {
            return Err(Error::InvalidGrid {
                n_points,
                reason: "point count must be odd so that x = 0 is a node",
            });
        }
        if n_points < MIN_GRID_POINTS {
            return Err(Error::InvalidGrid {
                n_points,
                reason: "fourth-order stencils need at least 9 points",
            });
        }
        Ok(Self {
            half_length,
            n_points,
        })
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// Index of the origin node.
    pub fn center(&self) -> usize {
        (self.n_points - 1) / 2
    }

    pub fn spacing(&self) -> f64 {
        self.half_length / self.center() as f64
    }

    /// `x_j`, computed as a signed multiple of the spacing so that `x_{N-1-j} = -x_j` exactly.
    pub fn x(&self, j: usize) -> f64 {
        (j as f64 - self.center() as f64) * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.x(j)).collect()
    }

    pub fn mirror(&self, j: usize) -> usize {
        self.n_points - 1 - j
    }
}

/// Parity label carried by grid functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
    None,
}

impl Parity {
    /// Parity of a product.
    pub fn times(self, other: Parity) -> Parity {
        match (self, other) {
            (Parity::None, _) | (_, Parity::None) => Parity::None,
            (a, b) if a == b => Parity::Even,
            _ => Parity::Odd,
        }
    }

    /// Parity after one derivative.
    pub fn flipped(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
            Parity::None => Parity::None,
        }
    }
}

/// One of the two invariant subspaces of the reflection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sector {
    Even,
    Odd,
}

impl Sector {
    pub fn parity(self) -> Parity {
        match self {
            Sector::Even => Parity::Even,
            Sector::Odd => Parity::Odd,
        }
    }

    /// `+1` for even, `-1` for odd: the eigenvalue of the reflection.
    pub fn sign(self) -> f64 {
        match self {
            Sector::Even => 1.0,
            Sector::Odd => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Sector::Even => "even",
            Sector::Odd => "odd",
        }
    }
}

/// Closed form `scale * sgn(x)^[odd] * |x|^power * exp(-rate x^2) * P(x^2)`.
///
/// Grid functions sampled from such a form keep it so that weighted inner
/// products can be evaluated exactly after the substitution `u = x^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticForm {
    pub odd: bool,
    pub power: f64,
    pub gauss_rate: f64,
    /// Coefficients of `P(u)` in ascending powers of `u`.
    pub poly: Vec<f64>,
    pub scale: f64,
}

impl AnalyticForm {
    pub fn eval(&self, x: f64) -> f64 {
        let u = x * x;
        let poly = self.poly.iter().rev().fold(0.0, |acc, c| acc * u + c);
        let sign = if self.odd && x < 0.0 { -1.0 } else { 1.0 };
        let origin = if self.odd && x == 0.0 { 0.0 } else { 1.0 };
        origin * sign * self.scale * abs_pow(x, self.power) * exp(-self.gauss_rate * u) * poly
    }

    pub fn parity(&self) -> Parity {
        if self.odd {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        self.scale *= factor;
        self
    }
}

/// Samples of a real function on a [`GridSpec`], with parity metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: GridSpec,
    values: Vec<f64>,
    parity: Parity,
    analytic: Option<AnalyticForm>,
}

const PARITY_TOLERANCE: f64 = 1e-14;

impl GridFunction {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid,
            values,
            parity: Parity::None,
            analytic: None,
        })
    }

    pub fn sample(grid: GridSpec, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..grid.n_points()).map(|j| f(grid.x(j))).collect();
        Self {
            grid,
            values,
            parity: Parity::None,
            analytic: None,
        }
    }

    pub fn from_analytic(grid: GridSpec, form: AnalyticForm) -> Self {
        let mut f = Self::sample(grid, |x| form.eval(x));
        f.parity = form.parity();
        f.analytic = Some(form);
        f
    }

    /// Samples `f` (an accurate evaluator of `form`) and keeps `form` for
    /// exact inner products.
    pub(crate) fn sample_with_form(grid: GridSpec, form: AnalyticForm, f: impl Fn(f64) -> f64) -> Self {
        let mut g = Self::sample(grid, f).projected(form.parity());
        g.analytic = Some(form);
        g
    }

    /// Declares a parity after checking the samples honour it to `1e-14`
    /// (relative to the largest sample), then symmetrizes exactly.
    pub fn with_parity(self, parity: Parity) -> Result<Self> {
        if parity != Parity::None && self.parity_defect(parity) > PARITY_TOLERANCE * self.max_abs() {
            return Err(Error::Parity("samples do not have the declared parity"));
        }
        Ok(self.projected(parity))
    }

    /// Exact projection onto a parity sector; `Parity::None` only relabels.
    pub fn projected(mut self, parity: Parity) -> Self {
        match parity {
            Parity::Even => self.values = self.even_values(),
            Parity::Odd => self.values = self.odd_values(),
            Parity::None => {}
        }
        if parity != self.parity {
            self.analytic = None;
        }
        self.parity = parity;
        self
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn analytic(&self) -> Option<&AnalyticForm> {
        self.analytic.as_ref()
    }

    /// Drops the closed-form metadata, e.g. after the samples were modified.
    pub fn forget_analytic(mut self) -> Self {
        self.analytic = None;
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub(crate) fn even_values(&self) -> Vec<f64> {
        let n = self.values.len();
        (0..n)
            .map(|j| 0.5 * (self.values[j] + self.values[n - 1 - j]))
            .collect()
    }

    pub(crate) fn odd_values(&self) -> Vec<f64> {
        let n = self.values.len();
        (0..n)
            .map(|j| 0.5 * (self.values[j] - self.values[n - 1 - j]))
            .collect()
    }

    pub fn even_part(&self) -> GridFunction {
        self.clone().forget_analytic().projected(Parity::Even)
    }

    pub fn odd_part(&self) -> GridFunction {
        self.clone().forget_analytic().projected(Parity::Odd)
    }

    /// Largest violation of the given parity, `max_j |f(x_j) -+ f(-x_j)|`.
    pub fn parity_defect(&self, parity: Parity) -> f64 {
        let n = self.values.len();
        let sign = match parity {
            Parity::Even => -1.0,
            Parity::Odd => 1.0,
            Parity::None => return 0.0,
        };
        let mirrored = (0..n)
            .map(|j| (self.values[j] + sign * self.values[n - 1 - j]).abs())
            .fold(0.0, f64::max);
        if parity == Parity::Odd {
            mirrored.max(self.values[self.grid.center()].abs())
        } else {
            mirrored
        }
    }

    /// Number of sign changes along the grid, skipping exact zeros.
    pub fn sign_changes(&self) -> usize {
        sign_changes(&self.values)
    }

    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> GridFunction {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(j, &v)| f(self.grid.x(j), v))
            .collect();
        GridFunction {
            grid: self.grid,
            values,
            parity: Parity::None,
            analytic: None,
        }
    }

    pub fn scaled(&self, factor: f64) -> GridFunction {
        GridFunction {
            grid: self.grid,
            values: self.values.iter().map(|v| v * factor).collect(),
            parity: self.parity,
            analytic: self.analytic.clone().map(|a| a.scaled(factor)),
        }
    }

    /// `self + factor * other`; parity is kept when both agree.
    pub fn axpy(&self, factor: f64, other: &GridFunction) -> Result<GridFunction> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + factor * b)
            .collect();
        let parity = if self.parity == other.parity {
            self.parity
        } else {
            Parity::None
        };
        Ok(GridFunction {
            grid: self.grid,
            values,
            parity,
            analytic: None,
        })
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        self.axpy(-1.0, other)
    }

    pub(crate) fn from_parts(grid: GridSpec, values: Vec<f64>, parity: Parity) -> GridFunction {
        let f = GridFunction {
            grid,
            values,
            parity: Parity::None,
            analytic: None,
        };
        f.projected(parity)
    }
}

pub(crate) fn sign_changes(values: &[f64]) -> usize {
    let mut last = 0.0_f64;
    let mut count = 0;
    for &v in values {
        if v == 0.0 {
            continue;
        }
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            count += 1;
        }
        last = v;
    }
    count
}
