use alloc::vec;
use alloc::vec::Vec;

use crate::drift::DriftSpec;
use crate::dunkl::{DunklParams, GridFunction, GridSpec, Sector};
use crate::error::{Error, Result};
use crate::linalg::{SymTridiagonal, Tridiagonal};
use crate::math::{abs_pow, exp, powf, sqrt};
use crate::special_fn::GaussLegendre;

/// Sector-reduced operator on the half grid `x_j = j h`, `j = 0..M-1`, with a
/// Dirichlet node at `x_M = L`.
///
/// Substituting `R psi = +-psi` turns the eigenproblem into the
/// Sturm-Liouville form `-(p v')' = lambda p v`, where `psi = g v`:
///
/// * even: `g = rho`, `p = x^{2 mu} rho`
/// * odd: `g = rho x^{-2 mu}`, `p = rho x^{-2 mu}`
///
/// and `rho = e^{2G}` is the stationary density. Writing `p = x^beta s(x)`
/// with `s` smooth, the finite-volume discretization is `K v = lambda M v`
/// with `K` the three-point flux matrix and `M` the diagonal cell masses
/// `int_cell p`.
#[derive(Debug, Clone)]
pub struct DiscretizedOperator {
    grid: GridSpec,
    sector: Sector,
    params: DunklParams,
    drift: DriftSpec,
    beta: f64,
    flux: Vec<f64>,
    mass: Vec<f64>,
    gauge: Vec<f64>,
}

/// Assembles the operator of one reflection sector for an odd drift.
pub fn build_sector_operator(
    w: &DriftSpec,
    p: DunklParams,
    grid: GridSpec,
    sector: Sector,
) -> Result<DiscretizedOperator> {
    if !w.is_odd() {
        return Err(Error::Parity("sector reduction needs an odd superpotential"));
    }
    let mu = p.mu();
    let c = w.pole_residue();
    let gauge_power = match sector {
        Sector::Even => 2.0 * c,
        Sector::Odd => 2.0 * c - 2.0 * mu,
    };
    let beta = match sector {
        Sector::Even => gauge_power + 2.0 * mu,
        Sector::Odd => gauge_power,
    };
    if beta <= -1.0 {
        return Err(Error::Regularity {
            sector: sector.name(),
            alpha: 0.5 * (beta - 1.0),
        });
    }
    let m = grid.center();
    let h = grid.spacing();
    // s = e^{2 (G - c ln|x|)}, the smooth factor of rho
    let smooth = |x: f64| -> Result<f64> {
        let g = w.log_gauge(x)? - if w.singular_at_zero() { c * crate::math::ln(x) } else { 0.0 };
        let s = exp(2.0 * g);
        if s.is_finite() {
            Ok(s)
        } else {
            Err(Error::Singularity { x })
        }
    };
    let weight = |x: f64| -> Result<f64> { Ok(abs_pow(x, beta) * smooth(x)?) };

    let flux = (0..m)
        .map(|j| Ok(weight((j as f64 + 0.5) * h)? / h))
        .collect::<Result<Vec<_>>>()?;

    let s1 = smooth(h)?;
    let s2 = smooth(2.0 * h)?;
    let s3 = smooth(3.0 * h)?;
    let s0 = (15.0 * s1 - 6.0 * s2 + s3) / 10.0;
    let rule = GaussLegendre::new(8)?;
    let mut mass = vec![0.0; m];
    mass[0] = product_moment(beta, [s0, s1, s2], 0.0, 0.5) * powf(h, beta + 1.0);
    mass[1] = product_moment(beta, [s0, s1, s2], 0.5, 1.5) * powf(h, beta + 1.0);
    for (j, mj) in mass.iter_mut().enumerate().skip(2) {
        let x = j as f64 * h;
        let mut total = 0.0;
        for (t, wt) in rule.mapped(x - 0.5 * h, x + 0.5 * h) {
            total += wt * weight(t)?;
        }
        *mj = total;
    }

    let mut gauge = Vec::with_capacity(m + 1);
    gauge.push(if gauge_power > 0.0 {
        0.0
    } else if gauge_power == 0.0 {
        s0
    } else {
        f64::INFINITY
    });
    for j in 1..=m {
        let x = j as f64 * h;
        gauge.push(abs_pow(x, gauge_power) * smooth(x)?);
    }

    Ok(DiscretizedOperator {
        grid,
        sector,
        params: p,
        drift: w.clone(),
        beta,
        flux,
        mass,
        gauge,
    })
}

// int_{ta}^{tb} t^beta q(t) dt with q the quadratic through (0, s0), (1, s1), (2, s2)
fn product_moment(beta: f64, s: [f64; 3], ta: f64, tb: f64) -> f64 {
    // q(t) = s0 + b t + c t^2
    let b = (-3.0 * s[0] + 4.0 * s[1] - s[2]) / 2.0;
    let c = (s[0] - 2.0 * s[1] + s[2]) / 2.0;
    let moment = |k: f64| {
        let e = beta + k + 1.0;
        (powf(tb, e) - if ta == 0.0 { 0.0 } else { powf(ta, e) }) / e
    };
    s[0] * moment(0.0) + b * moment(1.0) + c * moment(2.0)
}

impl DiscretizedOperator {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn params(&self) -> DunklParams {
        self.params
    }

    pub fn drift(&self) -> &DriftSpec {
        &self.drift
    }

    /// Number of half-grid unknowns, `(N - 1)/2`.
    pub fn dim(&self) -> usize {
        self.mass.len()
    }

    /// Exponent of `x` in the Sturm-Liouville weight near the origin.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Cell masses `int_cell p`; these carry the `|x|^{2 mu}` factor.
    pub fn weights(&self) -> &[f64] {
        &self.mass
    }

    /// Gauge factor `psi / v` at `x_j = j h`, `j = 0..=M`.
    pub fn gauge(&self) -> &[f64] {
        &self.gauge
    }

    /// Flux matrix `K` (symmetric, positive semi-definite).
    pub fn stiffness(&self) -> Tridiagonal {
        let m = self.dim();
        let diag = (0..m)
            .map(|j| self.flux[j] + if j > 0 { self.flux[j - 1] } else { 0.0 })
            .collect();
        let off: Vec<f64> = self.flux[..m - 1].iter().map(|k| -k).collect();
        Tridiagonal {
            lower: off.clone(),
            diag,
            upper: off,
        }
    }

    /// The operator acting on half-grid values `v`: `M^{-1} K`.
    pub fn matrix(&self) -> Tridiagonal {
        let k = self.stiffness();
        let m = &self.mass;
        Tridiagonal {
            lower: k.lower.iter().enumerate().map(|(i, v)| v / m[i + 1]).collect(),
            diag: k.diag.iter().zip(m).map(|(v, mi)| v / mi).collect(),
            upper: k.upper.iter().zip(m).map(|(v, mi)| v / mi).collect(),
        }
    }

    /// `W^{1/2} A W^{-1/2}` with `A = M^{-1} K` and `W = M`, built from `A`.
    pub fn symmetrized(&self) -> SymTridiagonal {
        let a = self.matrix();
        let m = &self.mass;
        let off = a
            .upper
            .iter()
            .enumerate()
            .map(|(i, v)| v * sqrt(m[i]) / sqrt(m[i + 1]))
            .collect();
        SymTridiagonal {
            diag: a.diag,
            off,
        }
    }

    /// Largest `|S_ij - S_ji|` of the weight-symmetrized matrix relative to its
    /// largest entry.
    pub fn symmetry_defect(&self) -> f64 {
        let a = self.matrix();
        let m = &self.mass;
        let mut defect = 0.0_f64;
        let mut scale = 0.0_f64;
        for i in 0..a.upper.len() {
            let upper = a.upper[i] * sqrt(m[i]) / sqrt(m[i + 1]);
            let lower = a.lower[i] * sqrt(m[i + 1]) / sqrt(m[i]);
            defect = defect.max((upper - lower).abs());
            scale = scale.max(upper.abs()).max(a.diag[i].abs());
        }
        if scale == 0.0 {
            0.0
        } else {
            defect / scale
        }
    }

    /// Mirrors half-grid values back to a full-grid function of this sector.
    pub fn to_full_grid(&self, v: &[f64]) -> Result<GridFunction> {
        if self.gauge[0].is_infinite() {
            return Err(Error::Singularity { x: 0.0 });
        }
        let n = self.grid.n_points();
        let c = self.grid.center();
        let sign = self.sector.sign();
        let mut values = vec![0.0; n];
        for (j, vj) in v.iter().enumerate() {
            let psi = self.gauge[j] * vj;
            values[c + j] = psi;
            values[c - j] = sign * psi;
        }
        if self.sector == Sector::Odd {
            values[c] = 0.0;
        }
        Ok(GridFunction::from_parts(self.grid, values, self.sector.parity()))
    }

    /// Half-grid values `v = psi / g` of the sector part of a density, given
    /// by its samples on `x >= 0`. Where `g(0) = 0` the origin value is
    /// extrapolated from `x = h, 2h, 3h`.
    pub fn from_full_grid(&self, half: &[f64]) -> Vec<f64> {
        let m = self.dim();
        let mut v = vec![0.0; m];
        for j in 1..m {
            v[j] = if self.gauge[j] > 0.0 { half[j] / self.gauge[j] } else { 0.0 };
        }
        v[0] = if self.gauge[0] > 0.0 && self.gauge[0].is_finite() {
            half[0] / self.gauge[0]
        } else {
            (15.0 * v[1] - 6.0 * v[2] + v[3]) / 10.0
        };
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drift::{generalized_ho_drift, DriftParity};

    fn p(mu: f64) -> DunklParams {
        DunklParams::new(mu).unwrap()
    }

    #[test]
    fn masses_add_up_to_the_weight_integral() {
        // even sector, a = 0, mu = 1/2: p = x e^{-x^2}, int_0^{L-h/2} p = (1 - e^{-(L-h/2)^2}) / 2
        let grid = GridSpec::new(4.0, 401).unwrap();
        let op = build_sector_operator(&generalized_ho_drift(0.0), p(0.5), grid, Sector::Even).unwrap();
        let total: f64 = op.weights().iter().sum();
        let top = 4.0 - 0.5 * grid.spacing();
        let exact = 0.5 * (1.0 - exp(-top * top));
        assert!((total - exact).abs() < 1e-10, "{total} vs {exact}");
    }

    #[test]
    fn symmetrized_matrix_is_symmetric() {
        let grid = GridSpec::new(8.0, 2001).unwrap();
        for sector in [Sector::Even, Sector::Odd] {
            let op = build_sector_operator(&generalized_ho_drift(1.0), p(0.5), grid, sector).unwrap();
            assert!(op.symmetry_defect() < 1e-10);
            assert_eq!(op.dim(), 1000);
        }
    }

    #[test]
    fn rejects_non_odd_and_irregular_drifts() {
        let grid = GridSpec::new(4.0, 41).unwrap();
        let w = DriftSpec::new(|x| -x + 0.1, |_| -1.0, DriftParity::None).unwrap();
        assert!(matches!(
            build_sector_operator(&w, p(0.0), grid, Sector::Even),
            Err(Error::Parity(_))
        ));
        // odd sector with 2(a - mu) = -1.2
        assert!(matches!(
            build_sector_operator(&generalized_ho_drift(0.0), p(0.6), grid, Sector::Odd),
            Err(Error::Regularity { .. })
        ));
    }
}
