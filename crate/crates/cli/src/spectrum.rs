use dunkl_fpe_core::analytic::{eigenvalue, validate_parity_parameters, OscillatorFamily};
use dunkl_fpe_core::{build_sector_operator, generalized_ho_drift, solve_spectrum, Error as CoreError, Sector};
use serde_json::{json, Value};

use crate::config::{Command, Format, RunConfig};
use crate::output::{config_json, open_sink, write_json, Cell, Table};
use crate::{warn, CliError};

/// One eigenvalue against its closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumRow {
    pub sector: Sector,
    pub n: usize,
    pub numeric: f64,
    pub analytic: f64,
    pub abs_error: f64,
    pub rel_error: f64,
    pub residual: f64,
    pub sector_residual: f64,
}

impl SpectrumRow {
    /// Relative error, or absolute for the zero mode.
    pub fn error(&self) -> f64 {
        if self.analytic == 0.0 {
            self.abs_error
        } else {
            self.rel_error
        }
    }
}

/// Sectors that could not be solved, with the reason.
pub type Skipped = Vec<(Sector, String)>;

pub fn compute(cfg: &RunConfig) -> Result<(Vec<SpectrumRow>, Skipped), CliError> {
    let grid = cfg.grid()?;
    let p = cfg.params()?;
    let w = generalized_ho_drift(cfg.a);
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    let sectors = cfg.parity.sectors();
    for &sector in sectors {
        let family = OscillatorFamily::new(cfg.a, cfg.mu, sector)?;
        let report = validate_parity_parameters(&family);
        for c in &report.conflicts {
            warn(&format!("{} sector: {}", sector.name(), c.detail));
        }
        let op = match build_sector_operator(&w, p, grid, sector) {
            Ok(op) => op,
            Err(e @ CoreError::Regularity { .. }) if sectors.len() > 1 => {
                warn(&format!("skipping {} sector: {e}", sector.name()));
                skipped.push((sector, e.to_string()));
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let spec = solve_spectrum(&op, cfg.n_max + 1)?;
        for (n, &numeric) in spec.eigenvalues.iter().enumerate() {
            let analytic = eigenvalue(&family, n)?;
            let abs_error = (numeric - analytic).abs();
            rows.push(SpectrumRow {
                sector,
                n,
                numeric,
                analytic,
                abs_error,
                rel_error: if analytic == 0.0 { f64::NAN } else { abs_error / analytic },
                residual: spec.residuals[n],
                sector_residual: spec.sector_residuals[n],
            });
        }
    }
    Ok((rows, skipped))
}

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    let (rows, skipped) = compute(cfg)?;
    let header = cfg.echo(Command::Spectrum);
    let mut out = open_sink(cfg.output.as_deref())?;
    match cfg.format {
        Format::Csv => {
            let mut t = Table::new(
                ["sector", "n", "lambda_numeric", "lambda_analytic", "abs_error", "rel_error", "residual", "sector_residual"]
                    .map(String::from)
                    .to_vec(),
            );
            for r in &rows {
                t.push(vec![
                    Cell::from(r.sector.name()),
                    Cell::from(r.n),
                    r.numeric.into(),
                    r.analytic.into(),
                    r.abs_error.into(),
                    r.rel_error.into(),
                    r.residual.into(),
                    r.sector_residual.into(),
                ]);
            }
            let trailer: Vec<_> = skipped
                .iter()
                .map(|(s, why)| (format!("skipped.{}", s.name()), why.clone()))
                .collect();
            t.write_csv(&mut *out, &header, &trailer)?;
        }
        Format::Json => {
            let sectors: Vec<Value> = cfg
                .parity
                .sectors()
                .iter()
                .filter(|s| !skipped.iter().any(|(k, _)| k == *s))
                .map(|&s| {
                    let modes: Vec<Value> = rows
                        .iter()
                        .filter(|r| r.sector == s)
                        .map(|r| {
                            json!({
                                "n": r.n,
                                "lambda_numeric": r.numeric,
                                "lambda_analytic": r.analytic,
                                "abs_error": r.abs_error,
                                "rel_error": crate::output::json_f64(r.rel_error),
                                "residual": r.residual,
                                "sector_residual": r.sector_residual,
                            })
                        })
                        .collect();
                    json!({ "sector": s.name(), "modes": modes })
                })
                .collect();
            let skipped: Vec<Value> = skipped
                .iter()
                .map(|(s, why)| json!({ "sector": s.name(), "reason": why }))
                .collect();
            write_json(
                &mut *out,
                &json!({ "config": config_json(&header), "sectors": sectors, "skipped": skipped }),
            )?;
        }
    }
    drop(out);
    if let Some(tol) = cfg.assert_tol {
        if let Some(worst) = rows.iter().max_by(|a, b| a.error().total_cmp(&b.error())) {
            if worst.error() > tol {
                return Err(CliError::Tolerance(format!(
                    "{} sector n = {}: error {:e} exceeds --assert-tol {tol:e}",
                    worst.sector.name(),
                    worst.n,
                    worst.error()
                )));
            }
        }
    }
    Ok(())
}
