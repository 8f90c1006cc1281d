//! Closed-form spectrum of the generalized oscillator drift `w = a/x - x`.
//!
//! With `u = x^2` both reflection sectors reduce to the Laguerre equation:
//!
//! * even: `psi_n = C e^{-x^2} |x|^{2a} L_n^{a+mu-1/2}(x^2)`
//! * odd: `psi_n = C sgn(x) e^{-x^2} |x|^{2(a-mu)} L_n^{a-mu-1/2}(x^2)`
//!
//! and in both the eigenvalue is `4n`, independent of `mu`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::dunkl::{
    analytic_inner_product, half_grid_weights, integrate_even_part, AnalyticForm, DunklParams,
    GridFunction, GridSpec, Sector,
};
use crate::error::{Error, Result};
use crate::math::{abs_pow, exp, powf, sqrt};
use crate::special_fn::{halfline_quadrature, laguerre_coefficients, laguerre_eval, LaguerreParams};

/// The oscillator family restricted to one reflection sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorFamily {
    a: f64,
    mu: f64,
    sector: Sector,
}

impl OscillatorFamily {
    /// Checks only `mu > -1/2` and finiteness; sector regularity is checked
    /// when eigenfunctions are requested, so invalid families can still be
    /// passed to [`validate_parity_parameters`].
    pub fn new(a: f64, mu: f64, sector: Sector) -> Result<Self> {
        DunklParams::new(mu)?;
        if !a.is_finite() {
            return Err(Error::InvalidParameter {
                name: "a",
                value: a,
                reason: "potential strength must be finite",
            });
        }
        Ok(Self { a, mu, sector })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    /// Laguerre order `a + mu - 1/2` (even) or `a - mu - 1/2` (odd).
    pub fn alpha(&self) -> f64 {
        match self.sector {
            Sector::Even => self.a + self.mu - 0.5,
            Sector::Odd => self.a - self.mu - 0.5,
        }
    }

    /// Power of `|x|` in front of the Laguerre factor.
    pub fn power(&self) -> f64 {
        match self.sector {
            Sector::Even => 2.0 * self.a,
            Sector::Odd => 2.0 * (self.a - self.mu),
        }
    }

    pub fn check_regular(&self) -> Result<()> {
        let alpha = self.alpha();
        if alpha > -1.0 {
            Ok(())
        } else {
            Err(Error::Regularity {
                sector: self.sector.name(),
                alpha,
            })
        }
    }

    fn laguerre(&self, n: usize) -> Result<LaguerreParams> {
        self.check_regular()?;
        LaguerreParams::new(n, self.alpha())
    }
}

/// `lambda_n = 4n`.
pub fn eigenvalue(family: &OscillatorFamily, n: usize) -> Result<f64> {
    family.check_regular()?;
    Ok(4.0 * n as f64)
}

/// A normalized eigenpair of the family.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSolution {
    pub family: OscillatorFamily,
    pub n: usize,
    pub lambda: f64,
    /// `C` such that the `mu`-weighted norm is one.
    pub normalization: f64,
}

impl EigenSolution {
    pub fn new(family: OscillatorFamily, n: usize) -> Result<Self> {
        Ok(Self {
            family,
            n,
            lambda: eigenvalue(&family, n)?,
            normalization: normalization_constant(&family, n)?,
        })
    }

    /// Closed form with the given constant in front.
    pub fn form_with_scale(&self, scale: f64) -> AnalyticForm {
        let poly = laguerre_coefficients(LaguerreParams::new(self.n, self.family.alpha()).expect("checked in new"));
        AnalyticForm {
            odd: self.family.sector == Sector::Odd,
            power: self.family.power(),
            gauss_rate: 1.0,
            poly,
            scale,
        }
    }

    pub fn form(&self) -> AnalyticForm {
        self.form_with_scale(self.normalization)
    }

    /// Pointwise value with constant `scale`, using the Laguerre recurrence.
    pub fn eval_scaled(&self, x: f64, scale: f64) -> f64 {
        let l = LaguerreParams::new(self.n, self.family.alpha()).expect("checked in new");
        let body = scale * exp(-x * x) * abs_pow(x, self.family.power()) * laguerre_eval(l, x * x);
        match self.family.sector {
            Sector::Even => body,
            Sector::Odd if x == 0.0 => 0.0,
            Sector::Odd => x.signum() * body,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_scaled(x, self.normalization)
    }

    /// Normalized samples carrying the closed form.
    pub fn sample(&self, grid: GridSpec) -> GridFunction {
        self.sample_scaled(grid, self.normalization)
    }

    pub fn sample_scaled(&self, grid: GridSpec, scale: f64) -> GridFunction {
        GridFunction::sample_with_form(grid, self.form_with_scale(scale), |x| self.eval_scaled(x, scale))
    }

    /// `psi_n / rho` with `rho = e^{-x^2} |x|^{2a}` the stationary density,
    /// up to the constant: the dual function for modal projections.
    pub fn dual_form(&self) -> AnalyticForm {
        let mut form = self.form_with_scale(1.0);
        form.power -= 2.0 * self.family.a;
        form.gauss_rate = 0.0;
        form
    }
}

/// Normalized even-sector eigenfunction at `x`.
pub fn eigenfunction_even(family: &OscillatorFamily, n: usize, x: f64) -> Result<f64> {
    if family.sector != Sector::Even {
        return Err(Error::Parity("family is not in the even sector"));
    }
    Ok(EigenSolution::new(*family, n)?.eval(x))
}

/// Normalized odd-sector eigenfunction at `x`.
pub fn eigenfunction_odd(family: &OscillatorFamily, n: usize, x: f64) -> Result<f64> {
    if family.sector != Sector::Odd {
        return Err(Error::Parity("family is not in the odd sector"));
    }
    Ok(EigenSolution::new(*family, n)?.eval(x))
}

/// `C` with `int psi_n^2 |x|^{2 mu} dx = 1`.
///
/// After `u = x^2` and `t = 2u` the squared norm is
/// `2^{-beta-1} int t^beta e^{-t} L_n(t/2)^2 dt` with
/// `beta = power + mu - 1/2`, done by Gauss-Laguerre on the recurrence.
pub fn normalization_constant(family: &OscillatorFamily, n: usize) -> Result<f64> {
    let l = family.laguerre(n)?;
    let beta = family.power() + family.mu - 0.5;
    if beta <= -1.0 {
        return Err(Error::Divergence("eigenfunction near the origin"));
    }
    let integral = halfline_quadrature(
        |t| {
            let v = laguerre_eval(l, 0.5 * t);
            v * v
        },
        beta,
        n + 1,
    )?;
    Ok(sqrt(powf(2.0, beta + 1.0) / integral))
}

/// The `mu = 0` solutions `C e^{-x^2} x^{2a} L_n^{a-1/2}(x^2)` with `4n`,
/// normalized independently of the Dunkl machinery.
pub fn classical_fpe_solution(a: f64, n: usize, x: f64) -> Result<(f64, f64)> {
    let alpha = a - 0.5;
    let l = LaguerreParams::new(n, alpha)?;
    // int e^{-2 x^2} x^{4a} L^2 dx = 2^{-beta-1} int t^beta e^{-t} L(t/2)^2 dt
    let beta = 2.0 * a - 0.5;
    let integral = halfline_quadrature(|t| powf(laguerre_eval(l, 0.5 * t), 2.0), beta, n + 2)?;
    let c = 1.0 / sqrt(integral / powf(2.0, beta + 1.0));
    let psi = c * exp(-x * x) * abs_pow(x, 2.0 * a) * laguerre_eval(l, x * x);
    Ok((psi, 4.0 * n as f64))
}

/// A statement about `(a, mu)` made in the derivation that the chosen
/// parameters violate while the others hold.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterConflict {
    pub statement: &'static str,
    pub detail: String,
}

/// Outcome of [`validate_parity_parameters`].
#[derive(Debug, Clone, PartialEq)]
pub struct ParityReport {
    pub sector: Sector,
    pub alpha: f64,
    /// `alpha > -1`: the Laguerre problem is solvable and the mode normalizable.
    pub integrable: bool,
    /// Even: `a` in {0, 1, 2, ...}. Odd: `2(a - mu)` in {1, 3, 5, ...}.
    pub parity_consistent: bool,
    /// Even: `a > 1/2`. Odd: `a - mu > 1/2`.
    pub regular_at_origin: bool,
    pub conflicts: Vec<ParameterConflict>,
}

impl ParityReport {
    pub fn valid(&self) -> bool {
        self.integrable && self.parity_consistent
    }
}

fn is_integer(x: f64) -> bool {
    (x - libm::round(x)).abs() < 1e-12
}

/// Reports the parameter restrictions for one sector without enforcing them.
///
/// A sector is valid when its Laguerre order exceeds -1 and the integer
/// condition that makes the power of `x` have the sector's parity holds.
/// The strict regularity inequalities are recorded and flagged when they
/// disagree with an otherwise valid choice.
pub fn validate_parity_parameters(family: &OscillatorFamily) -> ParityReport {
    let (a, mu) = (family.a, family.mu);
    let alpha = family.alpha();
    let (parity_consistent, regular_at_origin, rule, strict) = match family.sector {
        Sector::Even => (
            a >= 0.0 && is_integer(a),
            a > 0.5,
            "a must be one of 0, 1, 2, ...",
            "a > 1/2",
        ),
        Sector::Odd => {
            let k = 2.0 * (a - mu);
            (
                k > 0.0 && is_integer(k) && libm::round(k) as i64 % 2 == 1,
                a - mu > 0.5,
                "2(a - mu) must be one of 1, 3, 5, ...",
                "a - mu > 1/2",
            )
        }
    };
    let integrable = alpha > -1.0;
    let mut conflicts = Vec::new();
    if parity_consistent && !regular_at_origin {
        conflicts.push(ParameterConflict {
            statement: strict,
            detail: format!("{rule} holds but {strict} fails (a = {a}, mu = {mu})"),
        });
    }
    if regular_at_origin && !parity_consistent {
        conflicts.push(ParameterConflict {
            statement: rule,
            detail: format!("{strict} holds but {rule} fails (a = {a}, mu = {mu})"),
        });
    }
    ParityReport {
        sector: family.sector,
        alpha,
        integrable,
        parity_consistent,
        regular_at_origin,
        conflicts,
    }
}

/// Which measure a Gram matrix is taken in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GramWeight {
    /// `|x|^{2 mu}`.
    Dunkl,
    /// `|x|^{2 mu} / rho` with `rho = e^{-x^2}|x|^{2a}` the stationary density.
    Stationary,
}

/// Gram matrix of the normalized eigenfunctions `n, m <= n_max` of one sector,
/// evaluated exactly through the closed forms.
pub fn gram_matrix(family: &OscillatorFamily, n_max: usize, weight: GramWeight) -> Result<Vec<Vec<f64>>> {
    let modes = (0..=n_max)
        .map(|n| EigenSolution::new(*family, n))
        .collect::<Result<Vec<_>>>()?;
    let mut gram = vec![vec![0.0; n_max + 1]; n_max + 1];
    for (i, left) in modes.iter().enumerate() {
        let lf = left.form();
        for (j, right) in modes.iter().enumerate() {
            let rf = match weight {
                GramWeight::Dunkl => right.form(),
                GramWeight::Stationary => right.dual_form().scaled(right.normalization),
            };
            gram[i][j] = analytic_inner_product(&lf, &rf, family.mu)?;
        }
    }
    if weight == GramWeight::Stationary {
        // rescale to unit diagonal in the stationary measure
        let d: Vec<f64> = (0..=n_max).map(|i| sqrt(gram[i][i])).collect();
        for i in 0..=n_max {
            for j in 0..=n_max {
                gram[i][j] /= d[i] * d[j];
            }
        }
    }
    Ok(gram)
}

/// Expansion coefficient of a density on one eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeCoefficient {
    pub sector: Sector,
    pub n: usize,
    pub lambda: f64,
    pub value: f64,
}

/// Projects densities onto the normalized eigenfunctions using the dual
/// functions `psi_n / rho`, so that `P = sum_n c_n psi_n` gives back `c_n`.
#[derive(Debug, Clone)]
pub struct ModalProjector {
    grid: GridSpec,
    modes: Vec<ProjectedMode>,
}

#[derive(Debug, Clone)]
struct ProjectedMode {
    solution: EigenSolution,
    // smooth factor of the dual on the grid
    dual: Vec<f64>,
    weights: Vec<f64>,
    denominator: f64,
}

impl ModalProjector {
    /// Modes `0..=n_max` of every listed sector whose family is regular.
    pub fn new(a: f64, mu: f64, grid: GridSpec, n_max: usize, sectors: &[Sector]) -> Result<Self> {
        let mut modes = Vec::new();
        for &sector in sectors {
            let family = OscillatorFamily::new(a, mu, sector)?;
            family.check_regular()?;
            // dual = sgn^s |x|^q L_n(x^2); weights absorb |x|^{2 mu + q}
            let q = family.power() - 2.0 * a;
            let weights = half_grid_weights(&grid, mu + 0.5 * q)?;
            for n in 0..=n_max {
                let solution = EigenSolution::new(family, n)?;
                let l = LaguerreParams::new(n, family.alpha())?;
                let dual = grid
                    .nodes()
                    .iter()
                    .map(|&x| {
                        let v = laguerre_eval(l, x * x);
                        if sector == Sector::Odd { x.signum() * v } else { v }
                    })
                    .collect();
                let denominator = analytic_inner_product(&solution.form(), &solution.dual_form(), mu)?;
                modes.push(ProjectedMode {
                    solution,
                    dual,
                    weights: weights.clone(),
                    denominator,
                });
            }
        }
        Ok(Self { grid, modes })
    }

    pub fn project(&self, density: &GridFunction) -> Result<Vec<ModeCoefficient>> {
        if *density.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .modes
            .iter()
            .map(|m| {
                let num = integrate_even_part(density.values(), &m.dual, &self.grid, &m.weights);
                ModeCoefficient {
                    sector: m.solution.family.sector,
                    n: m.solution.n,
                    lambda: m.solution.lambda,
                    value: num / m.denominator,
                }
            })
            .collect())
    }

    pub fn solutions(&self) -> impl Iterator<Item = &EigenSolution> {
        self.modes.iter().map(|m| &m.solution)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dunkl::Parity;
    use crate::math::PI;

    fn fam(a: f64, mu: f64, sector: Sector) -> OscillatorFamily {
        OscillatorFamily::new(a, mu, sector).unwrap()
    }

    #[test]
    fn spectrum_is_four_n() {
        let f = fam(1.0, 0.5, Sector::Even);
        assert_eq!(eigenvalue(&f, 0).unwrap(), 0.0);
        assert_eq!(eigenvalue(&f, 3).unwrap(), 12.0);
        assert_eq!(eigenvalue(&fam(1.0, 0.0, Sector::Even), 2).unwrap(), 8.0);
        assert!(eigenvalue(&fam(-1.0, 0.0, Sector::Even), 0).is_err());
    }

    #[test]
    fn normalization_examples() {
        assert!((normalization_constant(&fam(1.0, 0.5, Sector::Even), 0).unwrap() - 2.0).abs() < 1e-13);
        let c = normalization_constant(&fam(0.0, 0.0, Sector::Even), 0).unwrap();
        assert!((1.0 / (c * c) - sqrt(0.5 * PI)).abs() < 1e-13);
        for n in 0..8 {
            let c = normalization_constant(&fam(0.3, 0.2, Sector::Odd), n).unwrap();
            assert!(c.is_finite() && c > 0.0);
        }
    }

    #[test]
    fn eigenfunction_examples() {
        let even = fam(1.0, 0.5, Sector::Even);
        let s = EigenSolution::new(even, 1).unwrap();
        assert!((s.eval_scaled(1.0, 1.0) - exp(-1.0)).abs() < 1e-15);
        let odd = fam(1.0, 0.5, Sector::Odd);
        let s = EigenSolution::new(odd, 0).unwrap();
        assert!((s.eval_scaled(0.7, 1.0) - 0.7 * exp(-0.49)).abs() < 1e-15);
        assert_eq!(s.eval(0.0), 0.0);
        let s = EigenSolution::new(odd, 1).unwrap();
        assert!(s.eval_scaled(1.0, 1.0).abs() < 1e-15);
        assert!(eigenfunction_odd(&even, 0, 1.0).is_err());
        assert!(eigenfunction_even(&fam(-2.0, 0.5, Sector::Even), 0, 1.0).is_err());
    }

    #[test]
    fn closed_form_matches_recurrence_samples() {
        let grid = GridSpec::new(8.0, 401).unwrap();
        for sector in [Sector::Even, Sector::Odd] {
            let s = EigenSolution::new(fam(1.0, 0.5, sector), 5).unwrap();
            let f = s.sample(grid);
            for (j, v) in f.values().iter().enumerate() {
                assert!((v - s.form().eval(grid.x(j))).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_mu_is_the_classical_solution() {
        for &a in &[0.0, 1.0, 1.5, 2.0] {
            let family = fam(a, 0.0, Sector::Even);
            for n in 0..6 {
                for &x in &[-2.5, -0.3, 0.0, 0.4, 1.0, 3.3] {
                    let (psi, lambda) = classical_fpe_solution(a, n, x).unwrap();
                    assert!((psi - eigenfunction_even(&family, n, x).unwrap()).abs() < 1e-14);
                    assert_eq!(lambda, 4.0 * n as f64);
                }
            }
        }
        let (psi, _) = classical_fpe_solution(1.0, 0, 1.0).unwrap();
        let c = normalization_constant(&fam(1.0, 0.0, Sector::Even), 0).unwrap();
        assert!((psi - c * exp(-1.0)).abs() < 1e-15);
    }

    #[test]
    fn parity_report_examples() {
        let r = validate_parity_parameters(&fam(1.0, 0.5, Sector::Even));
        assert!(r.valid());
        let r = validate_parity_parameters(&fam(1.0, 0.5, Sector::Odd));
        assert!(r.valid());
        let r = validate_parity_parameters(&fam(1.0, 0.3, Sector::Odd));
        assert!(!r.valid());
        let r = validate_parity_parameters(&fam(0.0, 0.2, Sector::Even));
        assert!(r.valid());
        assert_eq!(r.conflicts.len(), 1);
        assert_eq!(r.conflicts[0].statement, "a > 1/2");
    }

    #[test]
    fn stationary_weight_makes_modes_orthogonal() {
        for sector in [Sector::Even, Sector::Odd] {
            let g = gram_matrix(&fam(1.0, 0.5, sector), 5, GramWeight::Stationary).unwrap();
            for (i, row) in g.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((v - expected).abs() < 1e-12, "{sector:?} ({i}, {j}) = {v}");
                }
            }
        }
    }

    #[test]
    fn dunkl_weight_gram_is_a_gamma_moment_matrix() {
        // <psi_0, psi_1> for a = 1, mu = 1/2, both unnormalized:
        // int e^{-2u} u^2 (2 - u) du = 2 * 2/8 - 6/16 = 1/8
        let family = fam(1.0, 0.5, Sector::Even);
        let p0 = EigenSolution::new(family, 0).unwrap().form_with_scale(1.0);
        let p1 = EigenSolution::new(family, 1).unwrap().form_with_scale(1.0);
        let v = analytic_inner_product(&p0, &p1, 0.5).unwrap();
        assert!((v - 0.125).abs() < 1e-14);
        let g = gram_matrix(&family, 3, GramWeight::Dunkl).unwrap();
        for i in 0..=3 {
            assert!((g[i][i] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn node_counts() {
        let grid = GridSpec::new(8.0, 2001).unwrap();
        for n in 0..6 {
            let e = EigenSolution::new(fam(1.0, 0.5, Sector::Even), n).unwrap().sample(grid);
            let o = EigenSolution::new(fam(1.0, 0.5, Sector::Odd), n).unwrap().sample(grid);
            assert_eq!(e.sign_changes(), 2 * n);
            assert_eq!(o.sign_changes(), 2 * n + 1);
            assert_eq!(o.values()[grid.center()], 0.0);
            assert_eq!(e.parity(), Parity::Even);
        }
    }

    #[test]
    fn ground_state_is_the_squared_gauge_factor() {
        let grid = GridSpec::new(6.0, 601).unwrap();
        for &a in &[0.0, 1.0, 2.0] {
            let psi = EigenSolution::new(fam(a, 0.5, Sector::Even), 0).unwrap().sample(grid);
            let gauge = crate::drift::generalized_ho_drift(a).gauge_factor(&grid).unwrap();
            let ratio = psi.values()[grid.center() + 100] / powf(gauge.values()[grid.center() + 100], 2.0);
            for (p, g) in psi.values().iter().zip(gauge.values()) {
                assert!((p - ratio * g * g).abs() < 1e-12 * psi.max_abs());
            }
        }
    }

    #[test]
    fn projector_recovers_mixture_coefficients() {
        let grid = GridSpec::new(8.0, 2001).unwrap();
        let proj = ModalProjector::new(1.0, 0.5, grid, 4, &[Sector::Even, Sector::Odd]).unwrap();
        let e1 = EigenSolution::new(fam(1.0, 0.5, Sector::Even), 1).unwrap().sample(grid);
        let o2 = EigenSolution::new(fam(1.0, 0.5, Sector::Odd), 2).unwrap().sample(grid);
        let mix = e1.scaled(0.7).axpy(-0.2, &o2).unwrap();
        for c in proj.project(&mix).unwrap() {
            let expected = match (c.sector, c.n) {
                (Sector::Even, 1) => 0.7,
                (Sector::Odd, 2) => -0.2,
                _ => 0.0,
            };
            assert!((c.value - expected).abs() < 1e-9, "{c:?}");
        }
    }
}
