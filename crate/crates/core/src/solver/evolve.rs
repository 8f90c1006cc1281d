use alloc::vec;
use alloc::vec::Vec;

use super::sector::{build_sector_operator, DiscretizedOperator};
use crate::drift::DriftSpec;
use crate::dunkl::{DunklParams, GridFunction, GridSpec, Parity, Sector};
use crate::error::{Error, Result};
use crate::linalg::{Tridiagonal, TridiagonalLu};

/// Growth of `max |P|` over its initial value that aborts a run.
pub const BLOW_UP_FACTOR: f64 = 1e6;

/// Density at one time.
#[derive(Debug, Clone)]
pub struct EvolutionState {
    pub density: GridFunction,
    pub time: f64,
    pub step_count: usize,
    /// Step-doubling estimate of the local error of the last step
    /// (max norm); zero before any step.
    pub last_step_error_estimate: f64,
}

// Crank-Nicolson for one sector: (M + dt/2 K) v+ = (M - dt/2 K) v.
#[derive(Debug, Clone)]
struct SectorStepper {
    op: DiscretizedOperator,
    stiffness: Tridiagonal,
    full: TridiagonalLu,
    half: TridiagonalLu,
}

impl SectorStepper {
    fn new(op: DiscretizedOperator, dt: f64) -> Result<Self> {
        let stiffness = op.stiffness();
        let full = implicit_matrix(&stiffness, op.weights(), dt).factor()?;
        let half = implicit_matrix(&stiffness, op.weights(), 0.5 * dt).factor()?;
        Ok(Self {
            op,
            stiffness,
            full,
            half,
        })
    }

    fn step(&self, v: &[f64], dt: f64, lu: &TridiagonalLu) -> Vec<f64> {
        let kv = self.stiffness.mul_vec(v);
        let rhs: Vec<f64> = v
            .iter()
            .zip(&kv)
            .zip(self.op.weights())
            .map(|((vi, ki), mi)| mi * vi - 0.5 * dt * ki)
            .collect();
        lu.solve(&rhs)
    }
}

fn implicit_matrix(k: &Tridiagonal, mass: &[f64], dt: f64) -> Tridiagonal {
    let s = 0.5 * dt;
    Tridiagonal {
        lower: k.lower.iter().map(|v| s * v).collect(),
        diag: k.diag.iter().zip(mass).map(|(v, m)| m + s * v).collect(),
        upper: k.upper.iter().map(|v| s * v).collect(),
    }
}

/// Implicit trapezoidal (Crank-Nicolson) integrator for
/// `dP/dt = D^2 P - 2 D (w P)` with an odd drift.
///
/// The density is split into its even and odd parts, which evolve
/// independently in their sector operators; any initial data are accepted.
/// Each sector system is factored once per step size.
#[derive(Debug, Clone)]
pub struct Evolver {
    grid: GridSpec,
    dt: f64,
    even: SectorStepper,
    odd: Option<SectorStepper>,
}

impl Evolver {
    pub fn new(w: &DriftSpec, p: DunklParams, grid: GridSpec, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidParameter {
                name: "dt",
                value: dt,
                reason: "time step must be positive",
            });
        }
        let even = SectorStepper::new(build_sector_operator(w, p, grid, Sector::Even)?, dt)?;
        // an inadmissible odd sector only matters if the data have an odd part
        let odd = match build_sector_operator(w, p, grid, Sector::Odd) {
            Ok(op) => Some(SectorStepper::new(op, dt)?),
            Err(Error::Regularity { .. }) => None,
            Err(e) => return Err(e),
        };
        Ok(Self { grid, dt, even, odd })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Prepares a run from `P(., 0)`. `P(+-L)` is taken as zero.
    pub fn start(&self, initial: &GridFunction) -> Result<EvolutionRun<'_>> {
        if *initial.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        if initial.values().iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "initial",
                value: f64::NAN,
                reason: "initial density must be finite",
            });
        }
        let c = self.grid.center();
        let even_half: Vec<f64> = initial.even_values()[c..].to_vec();
        let odd_half: Vec<f64> = initial.odd_values()[c..].to_vec();
        let scale = initial.max_abs();
        let odd_present = odd_half.iter().any(|v| v.abs() > 1e-14 * scale);
        let odd = match (&self.odd, odd_present) {
            (Some(s), true) => Some(s.op.from_full_grid(&odd_half)),
            (None, true) => {
                return Err(Error::Regularity {
                    sector: "odd",
                    alpha: 0.5 * (self.even.op.beta() - 1.0),
                })
            }
            (_, false) => None,
        };
        let even = self.even.op.from_full_grid(&even_half);
        let mut run = EvolutionRun {
            evolver: self,
            even,
            odd,
            time: 0.0,
            step_count: 0,
            last_step_error_estimate: 0.0,
            initial_max: 0.0,
        };
        run.initial_max = max_abs(&run.density_values());
        Ok(run)
    }
}

/// A run in progress; the sector unknowns are kept between steps.
#[derive(Debug, Clone)]
pub struct EvolutionRun<'a> {
    evolver: &'a Evolver,
    even: Vec<f64>,
    odd: Option<Vec<f64>>,
    time: f64,
    step_count: usize,
    last_step_error_estimate: f64,
    initial_max: f64,
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

impl EvolutionRun<'_> {
    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn step_count(&self) -> usize {
        self.step_count
    }

    /// Advances by one step of the evolver's `dt`.
    pub fn step(&mut self) -> Result<()> {
        let dt = self.evolver.dt;
        self.even = self.evolver.even.step(&self.even, dt, &self.evolver.even.full);
        if let (Some(v), Some(s)) = (self.odd.as_mut(), self.evolver.odd.as_ref()) {
            *v = s.step(v, dt, &s.full);
        }
        self.time += dt;
        self.step_count += 1;
        self.check_growth()
    }

    /// One step that also estimates its error by comparing against two half
    /// steps: `|P_full - P_halves| / 3`.
    pub fn step_with_estimate(&mut self) -> Result<()> {
        let dt = self.evolver.dt;
        let mut halves = self.clone();
        for (v, s) in halves.sector_pairs() {
            let once = s.step(v, 0.5 * dt, &s.half);
            *v = s.step(&once, 0.5 * dt, &s.half);
        }
        self.step()?;
        let full = self.density_values();
        let twice = halves.density_values();
        self.last_step_error_estimate = full
            .iter()
            .zip(&twice)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
            / 3.0;
        Ok(())
    }

    fn sector_pairs(&mut self) -> Vec<(&mut Vec<f64>, &SectorStepper)> {
        let mut pairs = vec![(&mut self.even, &self.evolver.even)];
        if let (Some(v), Some(s)) = (self.odd.as_mut(), self.evolver.odd.as_ref()) {
            pairs.push((v, s));
        }
        pairs
    }

    fn check_growth(&self) -> Result<()> {
        let now = max_abs(&self.density_values());
        if !now.is_finite() || now > BLOW_UP_FACTOR * self.initial_max {
            return Err(Error::BlowUp {
                time: self.time,
                growth: now / self.initial_max,
            });
        }
        Ok(())
    }

    fn density_values(&self) -> Vec<f64> {
        let grid = self.evolver.grid;
        let c = grid.center();
        let mut values = vec![0.0; grid.n_points()];
        let mut add = |op: &DiscretizedOperator, v: &[f64]| {
            let sign = op.sector().sign();
            for (j, vj) in v.iter().enumerate() {
                let g = op.gauge()[j];
                let psi = if g == 0.0 { 0.0 } else { g * vj };
                if j == 0 {
                    if op.sector() == Sector::Even {
                        values[c] += psi;
                    }
                } else {
                    values[c + j] += psi;
                    values[c - j] += sign * psi;
                }
            }
        };
        add(&self.evolver.even.op, &self.even);
        if let (Some(v), Some(s)) = (self.odd.as_ref(), self.evolver.odd.as_ref()) {
            add(&s.op, v);
        }
        values
    }

    pub fn state(&self) -> EvolutionState {
        let parity = match self.odd {
            None => Parity::Even,
            Some(_) if max_abs(&self.even) == 0.0 => Parity::Odd,
            Some(_) => Parity::None,
        };
        let density = GridFunction::from_parts(self.evolver.grid, self.density_values(), parity);
        EvolutionState {
            density,
            time: self.time,
            step_count: self.step_count,
            last_step_error_estimate: self.last_step_error_estimate,
        }
    }
}

/// Advances `initial` to `t_final` with Crank-Nicolson steps of size
/// `t_final / ceil(t_final / dt)` (at most `dt`), estimating the error of
/// the last step by step doubling.
pub fn evolve(
    initial: &GridFunction,
    w: &DriftSpec,
    p: DunklParams,
    t_final: f64,
    dt: f64,
) -> Result<EvolutionState> {
    if !(t_final.is_finite() && t_final >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "t_final",
            value: t_final,
            reason: "final time must be non-negative",
        });
    }
    let steps = step_count(t_final, dt)?;
    let dt = if steps == 0 { dt } else { t_final / steps as f64 };
    let evolver = Evolver::new(w, p, *initial.grid(), dt)?;
    let mut run = evolver.start(initial)?;
    for k in 0..steps {
        if k + 1 == steps {
            run.step_with_estimate()?;
        } else {
            run.step()?;
        }
    }
    let mut state = run.state();
    state.time = t_final;
    Ok(state)
}

/// Number of steps of size at most `dt` that reach `t_final`.
pub(crate) fn step_count(t_final: f64, dt: f64) -> Result<usize> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParameter {
            name: "dt",
            value: dt,
            reason: "time step must be positive",
        });
    }
    let ratio = t_final / dt;
    let rounded = libm::round(ratio);
    Ok(if (ratio - rounded).abs() < 1e-9 * rounded.max(1.0) {
        rounded as usize
    } else {
        libm::ceil(ratio) as usize
    })
}
