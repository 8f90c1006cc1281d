use dunkl_fpe_core::analytic::{validate_parity_parameters, EigenSolution, OscillatorFamily};
use dunkl_fpe_core::dunkl::weighted_norm;
use dunkl_fpe_core::{build_sector_operator, generalized_ho_drift, solve_spectrum, GridFunction, Sector};
use serde_json::{json, Value};

use crate::config::{Command, Format, RunConfig};
use crate::output::{config_json, fmt_f64, json_f64, open_sink, write_json, Cell, Table};
use crate::{warn, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Analytic,
    Numeric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub sector: Sector,
    pub n: usize,
    pub kind: CurveKind,
    pub values: Vec<f64>,
    /// `mu`-weighted norm by grid quadrature.
    pub quadrature_norm: f64,
}

impl Curve {
    pub fn name(&self) -> String {
        let tag = match self.kind {
            CurveKind::Analytic => "psi",
            CurveKind::Numeric => "psi_numeric",
        };
        format!("{tag}_{}_{}", self.sector.name(), self.n)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigfunData {
    pub x: Vec<f64>,
    pub curves: Vec<Curve>,
}

/// Closed-form curves (C = 1 unless `--normalize`) and, with `--numeric`,
/// solver eigenvectors on the same scale and sign.
pub fn compute(cfg: &RunConfig) -> Result<EigfunData, CliError> {
    let grid = cfg.grid()?;
    let p = cfg.params()?;
    let mut curves = Vec::new();
    for &sector in cfg.parity.sectors() {
        let family = OscillatorFamily::new(cfg.a, cfg.mu, sector)?;
        let report = validate_parity_parameters(&family);
        if !report.valid() {
            return Err(CliError::Config(format!(
                "{} sector is invalid for a = {}, mu = {}: Laguerre order {} (integrable: {}, parity-consistent: {})",
                sector.name(),
                cfg.a,
                cfg.mu,
                report.alpha,
                report.integrable,
                report.parity_consistent
            )));
        }
        for c in &report.conflicts {
            warn(&format!("{} sector: {}", sector.name(), c.detail));
        }
        let solutions = (0..=cfg.n_max)
            .map(|n| EigenSolution::new(family, n))
            .collect::<Result<Vec<_>, _>>()?;
        let mut analytic = Vec::new();
        for sol in &solutions {
            let scale = if cfg.normalize { sol.normalization } else { 1.0 };
            let f = GridFunction::sample(grid, |x| sol.eval_scaled(x, scale));
            analytic.push(Curve {
                sector,
                n: sol.n,
                kind: CurveKind::Analytic,
                quadrature_norm: weighted_norm(&f, p)?,
                values: f.into_values(),
            });
        }
        let numeric = if cfg.numeric {
            let op = build_sector_operator(&generalized_ho_drift(cfg.a), p, grid, sector)?;
            let spec = solve_spectrum(&op, cfg.n_max + 1)?;
            spec.eigenfunctions
                .iter()
                .zip(&solutions)
                .zip(&analytic)
                .map(|((v, sol), reference)| {
                    let dot: f64 = v.values().iter().zip(&reference.values).map(|(a, b)| a * b).sum();
                    let sign = if dot < 0.0 { -1.0 } else { 1.0 };
                    let scale = if cfg.normalize { 1.0 } else { 1.0 / sol.normalization };
                    let f = v.scaled(sign * scale).forget_analytic();
                    Ok(Curve {
                        sector,
                        n: sol.n,
                        kind: CurveKind::Numeric,
                        quadrature_norm: weighted_norm(&f, p)?,
                        values: f.into_values(),
                    })
                })
                .collect::<Result<Vec<_>, CliError>>()?
        } else {
            Vec::new()
        };
        curves.extend(analytic);
        curves.extend(numeric);
    }
    Ok(EigfunData {
        x: grid.nodes(),
        curves,
    })
}

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    let data = compute(cfg)?;
    let header = cfg.echo(Command::Eigfun);
    let mut out = open_sink(cfg.output.as_deref())?;
    match cfg.format {
        Format::Csv => {
            let mut columns = vec!["x".to_string()];
            columns.extend(data.curves.iter().map(Curve::name));
            let mut t = Table::new(columns);
            for (j, &x) in data.x.iter().enumerate() {
                let mut row = vec![Cell::Num(x)];
                row.extend(data.curves.iter().map(|c| Cell::Num(c.values[j])));
                t.push(row);
            }
            let trailer: Vec<_> = data
                .curves
                .iter()
                .map(|c| (format!("quadrature-norm.{}", c.name()), fmt_f64(c.quadrature_norm)))
                .collect();
            t.write_csv(&mut *out, &header, &trailer)?;
        }
        Format::Json => {
            let curves: Vec<Value> = data
                .curves
                .iter()
                .map(|c| {
                    json!({
                        "name": c.name(),
                        "sector": c.sector.name(),
                        "n": c.n,
                        "kind": match c.kind { CurveKind::Analytic => "analytic", CurveKind::Numeric => "numeric" },
                        "a": cfg.a,
                        "mu": cfg.mu,
                        "normalized": cfg.normalize,
                        "quadrature_norm": json_f64(c.quadrature_norm),
                        "values": c.values.iter().map(|v| json_f64(*v)).collect::<Vec<_>>(),
                    })
                })
                .collect();
            write_json(
                &mut *out,
                &json!({
                    "config": config_json(&header),
                    "x": data.x.iter().map(|v| json_f64(*v)).collect::<Vec<_>>(),
                    "curves": curves,
                }),
            )?;
        }
    }
    Ok(())
}
