use alloc::vec::Vec;

use super::sector::DiscretizedOperator;
use crate::dunkl::stencil::{first_derivative, second_derivative};
use crate::dunkl::{apply_dfp_operator, weighted_norm, GridFunction, Sector};
use crate::error::{Error, Result};
use crate::math::sqrt;

/// The lowest eigenpairs of one sector.
#[derive(Debug, Clone)]
pub struct SpectralResult {
    pub sector: Sector,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Unit `mu`-weighted norm, positive at the first node right of the origin.
    pub eigenfunctions: Vec<GridFunction>,
    /// `max |H psi - lambda psi|` with the full-line operator.
    pub residuals: Vec<f64>,
    /// The same for the local sector equation on `x > 0`.
    pub sector_residuals: Vec<f64>,
}

/// The `k` smallest eigenpairs of the weighted problem `K v = lambda M v`,
/// by Sturm bisection and inverse iteration on the symmetrized matrix.
pub fn solve_spectrum(op: &DiscretizedOperator, k: usize) -> Result<SpectralResult> {
    if k == 0 || k > op.dim() {
        return Err(Error::InvalidParameter {
            name: "k",
            value: k as f64,
            reason: "number of eigenpairs must be between 1 and the matrix dimension",
        });
    }
    let s = op.symmetrized();
    let mass = op.weights();
    let mut eigenvalues = Vec::with_capacity(k);
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(k);
    for i in 0..k {
        let lambda = s.eigenvalue_by_bisection(i)?;
        let y = s.eigenvector_by_inverse_iteration(lambda, &vectors)?;
        eigenvalues.push(lambda);
        vectors.push(y);
    }

    let p = op.params();
    let mut eigenfunctions = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    let mut sector_residuals = Vec::with_capacity(k);
    for (lambda, y) in eigenvalues.iter().zip(&vectors) {
        let sign = if y[0] < 0.0 { -1.0 } else { 1.0 };
        let v: Vec<f64> = y.iter().zip(mass).map(|(yi, mi)| sign * yi / sqrt(*mi)).collect();
        let psi = op.to_full_grid(&v)?;
        let norm = weighted_norm(&psi, p)?;
        let psi = psi.scaled(1.0 / norm);
        let h = apply_dfp_operator(&psi, op.drift(), p)?;
        residuals.push(max_deviation(h.values(), psi.values(), *lambda, 0));
        sector_residuals.push(sector_residual(op, &psi, *lambda));
        eigenfunctions.push(psi);
    }
    Ok(SpectralResult {
        sector: op.sector(),
        eigenvalues,
        eigenfunctions,
        residuals,
        sector_residuals,
    })
}

fn max_deviation(h: &[f64], psi: &[f64], lambda: f64, from: usize) -> f64 {
    h[from..]
        .iter()
        .zip(&psi[from..])
        .map(|(a, b)| (a - lambda * b).abs())
        .fold(0.0, f64::max)
}

// Residual of the local equation on x > 0:
//   even: -psi'' - (2mu/x) psi' + 2 (w psi)' + (4mu/x) w psi
//   odd:  -psi'' - 2mu (psi/x)' + 2 (w psi)'
fn sector_residual(op: &DiscretizedOperator, psi: &GridFunction, lambda: f64) -> f64 {
    let grid = psi.grid();
    let c = grid.center();
    let h = grid.spacing();
    let mu = op.params().mu();
    let w = op.drift();
    let values = psi.values();
    let nodes = grid.nodes();
    let wpsi: Vec<f64> = nodes
        .iter()
        .zip(values)
        .map(|(&x, v)| if x == 0.0 { 0.0 } else { w.eval(x) * v })
        .collect();
    let d1 = first_derivative(values, h);
    let d2 = second_derivative(values, h);
    let dwpsi = first_derivative(&wpsi, h);
    let quotient: Vec<f64> = nodes
        .iter()
        .zip(values)
        .map(|(&x, v)| if x == 0.0 { 0.0 } else { v / x })
        .collect();
    let dquotient = first_derivative(&quotient, h);
    // one-sided neighbourhood of the origin is excluded: stencils there
    // straddle the point where w and 1/x are singular
    let start = c + 3;
    let mut worst = 0.0_f64;
    for j in start..grid.n_points() {
        let x = nodes[j];
        let hpsi = match op.sector() {
            Sector::Even => -d2[j] - 2.0 * mu / x * d1[j] + 2.0 * dwpsi[j] + 4.0 * mu / x * wpsi[j],
            Sector::Odd => -d2[j] - 2.0 * mu * dquotient[j] + 2.0 * dwpsi[j],
        };
        worst = worst.max((hpsi - lambda * values[j]).abs());
    }
    worst
}
