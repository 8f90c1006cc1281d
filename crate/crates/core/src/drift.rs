//! Superpotentials, gauge factors and the supersymmetric operator algebra.
//!
//! The drift coefficient is `2 w(x)` and the diffusion coefficient is 1.
//! With odd `w` the ladder operators are
//! `A = (D + w)/sqrt(2)` and `A^+ = (-D + w)/sqrt(2)`, whose products give
//! the partner Hamiltonians `H+ = A A^+` and `H- = A^+ A`.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::dunkl::stencil::{divide_odd_by_x, fill_origin_limit};
use crate::dunkl::{
    apply_dfp_operator, dunkl_derivative, dunkl_second_derivative, reflect, DunklParams,
    GridFunction, GridSpec, Parity,
};
use crate::error::{Error, Result};
use crate::math::{exp, ln, sqrt};
use crate::special_fn::GaussLegendre;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Parity declared for a superpotential.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriftParity {
    Odd,
    None,
}

/// A superpotential `w` with its derivative and metadata.
///
/// A drift may have a simple pole `c/x` at the origin. The antiderivative
/// `G = int w` is then split as `c ln|x| + int_0^x (w(t) - c/t) dt`.
#[derive(Clone)]
pub struct DriftSpec {
    w: RealFn,
    w_prime: RealFn,
    log_gauge: Option<RealFn>,
    parity: DriftParity,
    pole_residue: f64,
    singular_at_zero: bool,
    params: BTreeMap<String, f64>,
}

impl fmt::Debug for DriftSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DriftSpec")
            .field("parity", &self.parity)
            .field("singular_at_zero", &self.singular_at_zero)
            .field("pole_residue", &self.pole_residue)
            .field("params", &self.params)
            .finish_non_exhaustive()
    }
}

const ODD_CHECK_POINTS: [f64; 8] = [0.1, 0.37, 0.5, 1.0, 1.7, 2.5, 4.0, 7.3];

impl DriftSpec {
    /// A drift regular at the origin. Declaring `DriftParity::Odd` is checked
    /// on a fixed set of sample points to `1e-12`.
    pub fn new(
        w: impl Fn(f64) -> f64 + Send + Sync + 'static,
        w_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
        parity: DriftParity,
    ) -> Result<Self> {
        let spec = Self {
            w: Arc::new(w),
            w_prime: Arc::new(w_prime),
            log_gauge: None,
            parity,
            pole_residue: 0.0,
            singular_at_zero: false,
            params: BTreeMap::new(),
        };
        if parity == DriftParity::Odd {
            spec.check_odd()?;
        }
        Ok(spec)
    }

    /// Marks a simple pole `residue / x` at the origin.
    pub fn with_pole(mut self, residue: f64) -> Self {
        self.pole_residue = residue;
        self.singular_at_zero = residue != 0.0;
        self
    }

    /// Supplies `G(x) = int w dx` in closed form (any additive constant).
    pub fn with_log_gauge(mut self, g: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.log_gauge = Some(Arc::new(g));
        self
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    fn check_odd(&self) -> Result<()> {
        for &x in &ODD_CHECK_POINTS {
            let (a, b) = (self.eval(x), self.eval(-x));
            if (a + b).abs() > 1e-12 * a.abs().max(1.0) {
                return Err(Error::Parity("superpotential declared odd is not odd"));
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.w)(x)
    }

    pub fn eval_prime(&self, x: f64) -> f64 {
        (self.w_prime)(x)
    }

    /// Drift coefficient `D1 = 2 w`.
    pub fn drift_coefficient(&self, x: f64) -> f64 {
        2.0 * self.eval(x)
    }

    /// Diffusion coefficient `D2 = 1`.
    pub fn diffusion_coefficient(&self, _x: f64) -> f64 {
        1.0
    }

    pub fn parity(&self) -> DriftParity {
        self.parity
    }

    pub fn is_odd(&self) -> bool {
        self.parity == DriftParity::Odd
    }

    pub fn singular_at_zero(&self) -> bool {
        self.singular_at_zero
    }

    pub fn pole_residue(&self) -> f64 {
        self.pole_residue
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.get(name).copied()
    }

    /// `w(x) - c/x`, the part of `w` that is regular at the origin.
    pub fn regular_part(&self, x: f64) -> f64 {
        if self.singular_at_zero {
            self.eval(x) - self.pole_residue / x
        } else {
            self.eval(x)
        }
    }

    fn regular_integral(&self, x: f64) -> Result<f64> {
        let rule = GaussLegendre::new(12)?;
        let panels = libm::ceil(x.abs() / 0.125).max(1.0) as usize;
        let width = x / panels as f64;
        let mut total = 0.0;
        for k in 0..panels {
            let lo = k as f64 * width;
            total += rule.integrate(|t| self.regular_part(t), lo, lo + width);
        }
        Ok(total)
    }

    /// `G(x) = int w dx`, from the closed form when one was supplied and by
    /// panel quadrature of the regular part otherwise.
    pub fn log_gauge(&self, x: f64) -> Result<f64> {
        if let Some(g) = &self.log_gauge {
            return Ok(g(x));
        }
        let pole = if self.singular_at_zero {
            self.pole_residue * ln(x.abs())
        } else {
            0.0
        };
        Ok(pole + self.regular_integral(x)?)
    }

    /// `e^{G(x)}` on the grid; the origin takes its limit (0 for a positive
    /// residue, 1 without a pole).
    pub fn gauge_factor(&self, grid: &GridSpec) -> Result<GridFunction> {
        let c = grid.center();
        if self.singular_at_zero && self.pole_residue < 0.0 {
            return Err(Error::Singularity { x: 0.0 });
        }
        let mut values = Vec::with_capacity(grid.n_points());
        for j in 0..grid.n_points() {
            let x = grid.x(j);
            values.push(if j == c && self.singular_at_zero {
                0.0
            } else {
                exp(self.log_gauge(x)?)
            });
        }
        let parity = if self.is_odd() {
            Parity::Even
        } else {
            Parity::None
        };
        Ok(GridFunction::from_parts(*grid, values, parity))
    }
}

/// The generalized oscillator superpotential `w(x) = a/x - x`.
pub fn generalized_ho_drift(a: f64) -> DriftSpec {
    let w = move |x: f64| if a == 0.0 { -x } else { a / x - x };
    let w_prime = move |x: f64| if a == 0.0 { -1.0 } else { -a / (x * x) - 1.0 };
    DriftSpec {
        w: Arc::new(w),
        w_prime: Arc::new(w_prime),
        log_gauge: None,
        parity: DriftParity::Odd,
        pole_residue: 0.0,
        singular_at_zero: false,
        params: BTreeMap::new(),
    }
    .with_pole(a)
    .with_log_gauge(move |x| {
        let pole = if a == 0.0 { 0.0 } else { a * ln(x.abs()) };
        pole - 0.5 * x * x
    })
    .with_param("a", a)
}

/// `V = w^2 + w'`.
pub fn susy_potential(w: &DriftSpec, x: f64) -> Result<f64> {
    if w.singular_at_zero() && x == 0.0 {
        return Err(Error::Singularity { x });
    }
    let v = w.eval(x);
    let value = v * v + w.eval_prime(x);
    if !value.is_finite() {
        return Err(Error::Singularity { x });
    }
    Ok(value)
}

/// `e^{int w}`, the zero mode of `-d^2 + w^2 + w'` at `mu = 0`.
pub fn classical_zero_mode(w: &DriftSpec, grid: GridSpec) -> Result<GridFunction> {
    if w.singular_at_zero() && w.pole_residue() <= -0.5 {
        return Err(Error::Divergence("zero mode (origin)"));
    }
    let mode = w.gauge_factor(&grid)?;
    let v = mode.values();
    let edge = v[0].abs().max(v[v.len() - 1].abs());
    if edge.is_nan() || edge > 1e-8 * mode.max_abs() {
        return Err(Error::Divergence("zero mode (tails)"));
    }
    Ok(mode)
}

/// Ladder operator selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    A,
    ADagger,
}

/// Sign of a partner Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Partner {
    Plus,
    Minus,
}

fn require_odd(w: &DriftSpec) -> Result<()> {
    if w.is_odd() {
        Ok(())
    } else {
        Err(Error::Parity("the supersymmetric algebra needs an odd superpotential"))
    }
}

/// Samples of `w` with the origin left at 0 (the odd limit).
fn drift_samples(w: &DriftSpec, grid: &GridSpec) -> Result<Vec<f64>> {
    let c = grid.center();
    (0..grid.n_points())
        .map(|j| {
            let x = grid.x(j);
            if j == c {
                return Ok(0.0);
            }
            let v = w.eval(x);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Singularity { x })
            }
        })
        .collect()
}

// Pointwise product with a possibly singular multiplier; the origin value is
// replaced by its even-part limit when the multiplier blows up there.
fn multiply(f: &GridFunction, m: &[f64], singular: bool) -> Vec<f64> {
    let mut v: Vec<f64> = f.values().iter().zip(m).map(|(a, b)| a * b).collect();
    if singular {
        fill_origin_limit(&mut v, f.grid().center());
    }
    v
}

/// `A f = (D f + w f)/sqrt(2)` or `A^+ f = (-D f + w f)/sqrt(2)`.
pub fn apply_susy_ladder(
    kind: Ladder,
    f: &GridFunction,
    w: &DriftSpec,
    p: DunklParams,
) -> Result<GridFunction> {
    require_odd(w)?;
    let ws = drift_samples(w, f.grid())?;
    let wf = multiply(f, &ws, w.singular_at_zero());
    let d = dunkl_derivative(f, p);
    let sign = match kind {
        Ladder::A => 1.0,
        Ladder::ADagger => -1.0,
    };
    let values = d
        .values()
        .iter()
        .zip(&wf)
        .map(|(df, wf)| (sign * df + wf) / sqrt(2.0))
        .collect();
    Ok(GridFunction::from_parts(*f.grid(), values, f.parity().flipped()))
}

/// `H+- f = (-D^2 f + w^2 f +- (w' f + (2 mu/x) w R f)) / 2`.
pub fn apply_partner_hamiltonian(
    sign: Partner,
    f: &GridFunction,
    w: &DriftSpec,
    p: DunklParams,
) -> Result<GridFunction> {
    require_odd(w)?;
    let grid = *f.grid();
    let c = grid.center();
    let ws = drift_samples(w, &grid)?;
    let wps: Vec<f64> = (0..grid.n_points())
        .map(|j| if j == c && w.singular_at_zero() { 0.0 } else { w.eval_prime(grid.x(j)) })
        .collect();
    // w / x is even; for regular odd w its origin value is w'(0)
    let w_over_x = if w.singular_at_zero() {
        (0..grid.n_points())
            .map(|j| if j == c { 0.0 } else { ws[j] / grid.x(j) })
            .collect()
    } else {
        divide_odd_by_x(&ws, &grid.nodes(), c)
    };
    let s = match sign {
        Partner::Plus => 1.0,
        Partner::Minus => -1.0,
    };
    let rf = reflect(f);
    let mu = p.mu();
    let mut potential: Vec<f64> = (0..grid.n_points())
        .map(|j| {
            let v = f.values()[j];
            ws[j] * ws[j] * v + s * (wps[j] * v + 2.0 * mu * w_over_x[j] * rf.values()[j])
        })
        .collect();
    if w.singular_at_zero() {
        fill_origin_limit(&mut potential, c);
    }
    let d2 = dunkl_second_derivative(f, p);
    let values = d2
        .values()
        .iter()
        .zip(&potential)
        .map(|(d2, q)| 0.5 * (q - d2))
        .collect();
    Ok(GridFunction::from_parts(grid, values, f.parity()))
}

/// `e^{-G} H_DFP (e^{G} f)`: the Dunkl-Fokker-Planck operator in the
/// Schrodinger picture, where `psi = e^{G} Psi`.
pub fn apply_gauge_transformed_dfp(
    f: &GridFunction,
    w: &DriftSpec,
    p: DunklParams,
) -> Result<GridFunction> {
    let gauge = w.gauge_factor(f.grid())?;
    let density = to_density_picture(f, &gauge)?;
    let h = apply_dfp_operator(&density, w, p)?;
    to_schrodinger_picture(&h, &gauge)
}

/// `psi = e^{G} Psi`.
pub fn to_density_picture(f: &GridFunction, gauge: &GridFunction) -> Result<GridFunction> {
    if f.grid() != gauge.grid() {
        return Err(Error::GridMismatch);
    }
    let values = f.values().iter().zip(gauge.values()).map(|(a, g)| a * g).collect();
    Ok(GridFunction::from_parts(*f.grid(), values, gauged_parity(f, gauge)))
}

/// `Psi = e^{-G} psi`; fails where the gauge factor vanishes away from 0.
pub fn to_schrodinger_picture(f: &GridFunction, gauge: &GridFunction) -> Result<GridFunction> {
    if f.grid() != gauge.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = f.grid();
    let c = grid.center();
    let mut values = Vec::with_capacity(f.len());
    for (j, (a, g)) in f.values().iter().zip(gauge.values()).enumerate() {
        if *g == 0.0 && j != c {
            return Err(Error::Singularity { x: grid.x(j) });
        }
        values.push(if *g == 0.0 { 0.0 } else { a / g });
    }
    if gauge.values()[c] == 0.0 {
        fill_origin_limit(&mut values, c);
    }
    Ok(GridFunction::from_parts(*grid, values, gauged_parity(f, gauge)))
}

fn gauged_parity(f: &GridFunction, gauge: &GridFunction) -> Parity {
    if gauge.parity() == Parity::Even {
        f.parity()
    } else {
        Parity::None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::sin;

    fn p(mu: f64) -> DunklParams {
        DunklParams::new(mu).unwrap()
    }

    #[test]
    fn oscillator_drift_values() {
        let w = generalized_ho_drift(1.0);
        assert!((w.eval(2.0) + 1.5).abs() < 1e-15);
        assert!((w.eval_prime(2.0) + 1.25).abs() < 1e-15);
        assert_eq!(w.param("a"), Some(1.0));
        assert!(w.is_odd() && w.singular_at_zero());
        let flat = generalized_ho_drift(0.0);
        assert_eq!(flat.eval(0.0), 0.0);
        assert!(!flat.singular_at_zero());
    }

    #[test]
    fn potential_matches_the_oscillator_form() {
        let form = |a: f64, x: f64| a * (a - 1.0) / (x * x) + x * x - 2.0 * a - 1.0;
        assert!((susy_potential(&generalized_ho_drift(0.0), 1.3).unwrap() - 0.69).abs() < 1e-14);
        for &(a, x) in &[(2.0, 1.0), (1.0, 2.0), (1.0, 1.0), (0.7, 0.4)] {
            let v = susy_potential(&generalized_ho_drift(a), x).unwrap();
            assert!((v - form(a, x)).abs() < 1e-12, "a = {a}, x = {x}");
        }
        assert!(susy_potential(&generalized_ho_drift(1.0), 0.0).is_err());
    }

    #[test]
    fn odd_declaration_is_checked() {
        assert!(DriftSpec::new(|x| x + x * x, |x| 1.0 + 2.0 * x, DriftParity::Odd).is_err());
        assert!(DriftSpec::new(sin, libm::cos, DriftParity::Odd).is_ok());
    }

    #[test]
    fn numeric_log_gauge_matches_closed_form() {
        let closed = generalized_ho_drift(1.5);
        let numeric = DriftSpec::new(|x| 1.5 / x - x, |x| -1.5 / (x * x) - 1.0, DriftParity::Odd)
            .unwrap()
            .with_pole(1.5);
        for &x in &[0.3, 1.0, -2.2, 5.0] {
            let a = closed.log_gauge(x).unwrap();
            let b = numeric.log_gauge(x).unwrap();
            assert!((a - b).abs() < 1e-13, "x = {x}: {a} vs {b}");
        }
    }

    #[test]
    fn zero_modes() {
        let grid = GridSpec::new(8.0, 801).unwrap();
        let gauss = classical_zero_mode(&generalized_ho_drift(0.0), grid).unwrap();
        let pole = classical_zero_mode(&generalized_ho_drift(1.0), grid).unwrap();
        for j in 0..grid.n_points() {
            let x = grid.x(j);
            assert!((gauss.values()[j] - exp(-0.5 * x * x)).abs() < 1e-14);
            assert!((pole.values()[j] - x.abs() * exp(-0.5 * x * x)).abs() < 1e-14);
        }
        let unbounded = DriftSpec::new(|x| x, |_| 1.0, DriftParity::Odd).unwrap();
        assert!(classical_zero_mode(&unbounded, grid).is_err());
    }

    #[test]
    fn ladder_annihilates_the_classical_zero_mode() {
        // A e^{-int w} = 0 at mu = 0
        let grid = GridSpec::new(2.0, 801).unwrap();
        let w = DriftSpec::new(|x| -x - 0.2 * x * x * x, |x| -1.0 - 0.6 * x * x, DriftParity::Odd).unwrap();
        let f = GridFunction::sample(grid, |x| exp(0.5 * x * x + 0.05 * x * x * x * x));
        let r = apply_susy_ladder(Ladder::A, &f, &w, p(0.0)).unwrap();
        assert!(r.max_abs() < 1e-6 * f.max_abs());
    }

    #[test]
    fn partner_requires_odd_drift() {
        let grid = GridSpec::new(4.0, 41).unwrap();
        let f = GridFunction::sample(grid, |x| exp(-x * x));
        let w = DriftSpec::new(|x| x + x * x, |x| 1.0 + 2.0 * x, DriftParity::None).unwrap();
        assert!(matches!(
            apply_partner_hamiltonian(Partner::Plus, &f, &w, p(0.5)),
            Err(Error::Parity(_))
        ));
        assert!(apply_susy_ladder(Ladder::A, &f, &w, p(0.5)).is_err());
    }

    #[test]
    fn partner_at_zero_mu_is_classical() {
        let grid = GridSpec::new(5.0, 501).unwrap();
        let w = generalized_ho_drift(0.0);
        let f = GridFunction::sample(grid, |x| exp(-x * x) * (1.0 + x));
        let h = apply_partner_hamiltonian(Partner::Minus, &f, &w, p(0.0)).unwrap();
        let d2 = crate::dunkl::stencil::second_derivative(f.values(), grid.spacing());
        for j in 0..grid.n_points() {
            let x = grid.x(j);
            let classical = 0.5 * (-d2[j] + (x * x + 1.0) * f.values()[j]);
            assert!((h.values()[j] - classical).abs() < 1e-12);
        }
    }
}
