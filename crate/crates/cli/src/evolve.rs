use std::path::{Path, PathBuf};
use std::str::FromStr;

use dunkl_fpe_core::analytic::{EigenSolution, ModalProjector, OscillatorFamily};
use dunkl_fpe_core::dunkl::weighted_norm;
use dunkl_fpe_core::solver::{decay_rate_estimate, DecayFit, Evolver};
use dunkl_fpe_core::{generalized_ho_drift, GridFunction, GridSpec, Sector};
use serde_json::{json, Value};

use crate::config::{Command, Format, RunConfig};
use crate::output::{config_json, fmt_f64, json_f64, open_sink, write_json, Cell, Table};
use crate::{warn, CliError};

/// Initial density selector.
#[derive(Debug, Clone, PartialEq)]
pub enum Initial {
    /// Normalized closed-form eigenfunction.
    Mode { n: usize, sector: Sector },
    /// `exp(-(x - center)^2 / (2 width^2))`.
    Gaussian { center: f64, width: f64 },
    /// Two-column CSV `x,value` on the run's grid.
    File(PathBuf),
}

impl FromStr for Initial {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = |why: &str| CliError::Config(format!("--initial {s}: {why}"));
        let (kind, rest) = s.split_once(':').ok_or_else(|| bad("expected KIND:ARGS"))?;
        match kind {
            "mode" => {
                let (n, parity) = rest.split_once(':').ok_or_else(|| bad("expected mode:N:PARITY"))?;
                let n = n.parse().map_err(|_| bad("mode index is not a non-negative integer"))?;
                let sector = match parity {
                    "even" => Sector::Even,
                    "odd" => Sector::Odd,
                    _ => return Err(bad("parity must be even or odd")),
                };
                Ok(Initial::Mode { n, sector })
            }
            "gaussian" => {
                let (c, w) = rest.split_once(',').ok_or_else(|| bad("expected gaussian:CENTER,WIDTH"))?;
                let center: f64 = c.trim().parse().map_err(|_| bad("center is not a number"))?;
                let width: f64 = w.trim().parse().map_err(|_| bad("width is not a number"))?;
                if !(center.is_finite() && width.is_finite() && width > 0.0) {
                    return Err(bad("center must be finite and width positive"));
                }
                Ok(Initial::Gaussian { center, width })
            }
            "file" if !rest.is_empty() => Ok(Initial::File(PathBuf::from(rest))),
            _ => Err(bad("kind must be mode, gaussian or file")),
        }
    }
}

impl Initial {
    pub fn sample(&self, cfg: &RunConfig, grid: GridSpec) -> Result<GridFunction, CliError> {
        match self {
            Initial::Mode { n, sector } => {
                let family = OscillatorFamily::new(cfg.a, cfg.mu, *sector)?;
                Ok(EigenSolution::new(family, *n)?.sample(grid).forget_analytic())
            }
            Initial::Gaussian { center, width } => Ok(GridFunction::sample(grid, |x| {
                let z = (x - center) / width;
                (-0.5 * z * z).exp()
            })),
            Initial::File(path) => read_density(path, grid),
        }
    }
}

fn read_density(path: &Path, grid: GridSpec) -> Result<GridFunction, CliError> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)?;
    let tol = 1e-9 * grid.half_length().max(1.0);
    let mut values = Vec::with_capacity(grid.n_points());
    for (j, rec) in r.records().enumerate() {
        let rec = rec?;
        let field = |k: usize| -> Result<f64, CliError> {
            rec.get(k)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| CliError::Config(format!("{}: row {} needs numeric x,value", path.display(), j + 1)))
        };
        let (x, v) = (field(0)?, field(1)?);
        if j >= grid.n_points() || (x - grid.x(j)).abs() > tol {
            return Err(CliError::Config(format!(
                "{}: row {} has x = {x}, which is not node {j} of the grid (N = {}, L = {})",
                path.display(),
                j + 1,
                grid.n_points(),
                grid.half_length()
            )));
        }
        values.push(v);
    }
    if values.len() != grid.n_points() {
        return Err(CliError::Config(format!(
            "{}: {} rows for a grid of {} points",
            path.display(),
            values.len(),
            grid.n_points()
        )));
    }
    Ok(GridFunction::new(grid, values)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub norm: f64,
    pub projections: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct EvolveData {
    pub dt: f64,
    pub steps: usize,
    pub modes: Vec<String>,
    pub rows: Vec<TraceRow>,
    pub decay: Option<DecayFit>,
    pub final_error_estimate: f64,
    pub final_density: GridFunction,
}

/// `ceil(t_final / dt)`, ignoring rounding noise in the ratio.
pub fn step_count(t_final: f64, dt: f64) -> usize {
    let r = t_final / dt;
    let near = r.round();
    if (r - near).abs() <= 1e-9 * near.max(1.0) {
        near as usize
    } else {
        r.ceil() as usize
    }
}

pub fn compute(cfg: &RunConfig) -> Result<EvolveData, CliError> {
    let grid = cfg.grid()?;
    let p = cfg.params()?;
    let initial: Initial = cfg.initial.parse()?;
    let density = initial.sample(cfg, grid)?;
    let w = generalized_ho_drift(cfg.a);
    let steps = step_count(cfg.t_final, cfg.dt);
    let dt = if steps == 0 { cfg.dt } else { cfg.t_final / steps as f64 };

    let regular: Vec<Sector> = [Sector::Even, Sector::Odd]
        .into_iter()
        .filter(|&s| OscillatorFamily::new(cfg.a, cfg.mu, s).is_ok_and(|f| f.check_regular().is_ok()))
        .collect();
    let projector = ModalProjector::new(cfg.a, cfg.mu, grid, cfg.n_max, &regular)?;
    let modes: Vec<String> = projector
        .solutions()
        .map(|s| format!("c_{}_{}", s.family.sector().name(), s.n))
        .collect();
    let sample = |d: &GridFunction, t: f64| -> Result<TraceRow, CliError> {
        Ok(TraceRow {
            t,
            norm: weighted_norm(d, p)?,
            projections: projector.project(d)?.iter().map(|c| c.value).collect(),
        })
    };

    let evolver = Evolver::new(&w, p, grid, dt)?;
    let mut run = evolver.start(&density)?;
    let mut rows = vec![sample(&density, 0.0)?];
    for k in 1..=steps {
        let stepped = if k == steps { run.step_with_estimate() } else { run.step() };
        stepped.map_err(|e| CliError::Numerical(format!("step {k} of {steps}: {e}")))?;
        if k % cfg.sample_every == 0 || k == steps {
            let state = run.state();
            rows.push(sample(&state.density, k as f64 * dt)?);
        }
    }
    let state = run.state();
    let trace: Vec<(f64, f64)> = rows.iter().map(|r| (r.t, r.norm)).collect();
    let decay = match decay_rate_estimate(&trace) {
        Ok(fit) => Some(fit),
        Err(e) => {
            warn(&format!("no decay fit: {e}"));
            None
        }
    };
    Ok(EvolveData {
        dt,
        steps,
        modes,
        rows,
        decay,
        final_error_estimate: state.last_step_error_estimate,
        final_density: state.density,
    })
}

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    let data = compute(cfg)?;
    let header = cfg.echo(Command::Evolve);
    let mut out = open_sink(cfg.output.as_deref())?;
    match cfg.format {
        Format::Csv => {
            let mut columns = vec!["t".to_string(), "norm".to_string()];
            columns.extend(data.modes.iter().cloned());
            let mut t = Table::new(columns);
            for r in &data.rows {
                let mut row = vec![Cell::Num(r.t), Cell::Num(r.norm)];
                row.extend(r.projections.iter().map(|v| Cell::Num(*v)));
                t.push(row);
            }
            let mut trailer = vec![
                ("steps".to_string(), data.steps.to_string()),
                ("dt-effective".to_string(), fmt_f64(data.dt)),
                ("final-step-error-estimate".to_string(), fmt_f64(data.final_error_estimate)),
            ];
            match data.decay {
                Some(fit) => {
                    trailer.push(("decay-rate".into(), fmt_f64(fit.rate)));
                    trailer.push(("decay-fit-residual".into(), fmt_f64(fit.residual)));
                    trailer.push(("decay-degenerate".into(), fit.degenerate.to_string()));
                }
                None => trailer.push(("decay-rate".into(), "none".into())),
            }
            t.write_csv(&mut *out, &header, &trailer)?;
        }
        Format::Json => {
            let samples: Vec<Value> = data
                .rows
                .iter()
                .map(|r| {
                    let mut proj = serde_json::Map::new();
                    for (name, v) in data.modes.iter().zip(&r.projections) {
                        proj.insert(name.clone(), json_f64(*v));
                    }
                    json!({ "t": r.t, "norm": json_f64(r.norm), "projections": proj })
                })
                .collect();
            let decay = data.decay.map_or(Value::Null, |fit| {
                json!({ "rate": fit.rate, "residual": fit.residual, "degenerate": fit.degenerate })
            });
            write_json(
                &mut *out,
                &json!({
                    "config": config_json(&header),
                    "steps": data.steps,
                    "dt_effective": data.dt,
                    "samples": samples,
                    "decay": decay,
                    "final_step_error_estimate": json_f64(data.final_error_estimate),
                }),
            )?;
        }
    }
    Ok(())
}
