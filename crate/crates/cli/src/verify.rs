use dunkl_fpe_core::analytic::{
    classical_fpe_solution, gram_matrix, EigenSolution, GramWeight, OscillatorFamily,
};
use dunkl_fpe_core::drift::{
    apply_gauge_transformed_dfp, apply_partner_hamiltonian, apply_susy_ladder, Ladder, Partner,
};
use dunkl_fpe_core::dunkl::{
    apply_dfp_operator, dunkl_derivative, reflect, weighted_inner_product, weighted_norm,
};
use dunkl_fpe_core::solver::{decay_rate_estimate, Evolver};
use dunkl_fpe_core::{
    build_sector_operator, evolve, generalized_ho_drift, solve_spectrum, DriftParity, DriftSpec,
    DunklParams, GridFunction, GridSpec, Parity, Sector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{Command, Format, RunConfig};
use crate::output::{config_json, json_f64, open_sink, write_json, Cell, Table};
use crate::tolerances as tol;
use crate::CliError;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "DUNKL_FPE_THREADS";

const A: f64 = 1.0;
const MU: f64 = 0.5;
const L: f64 = 8.0;
const SEED: u64 = 0x5eed;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, measured: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self {
            name,
            measured,
            tolerance,
            passed: measured <= tolerance,
            detail: detail.into(),
        }
    }
}

/// Settings shared by all checks.
#[derive(Debug, Clone, Copy)]
pub struct Suite {
    pub quick: bool,
    pub negate: bool,
}

impl Suite {
    pub fn grid_n(self) -> usize {
        if self.quick {
            501
        } else {
            2001
        }
    }

    fn fourth(self, t: f64) -> f64 {
        if self.quick {
            t * tol::QUICK_FOURTH_ORDER
        } else {
            t
        }
    }

    fn second(self, t: f64) -> f64 {
        if self.quick {
            t * tol::QUICK_SECOND_ORDER
        } else {
            t
        }
    }

    fn grid(self, half_length: f64) -> GridSpec {
        GridSpec::new(half_length, self.grid_n()).expect("fixed grid is valid")
    }
}

type CheckFn = fn(Suite) -> Result<Check, CliError>;

const CHECKS: &[(&str, CheckFn)] = &[
    ("reflection_involution", reflection_involution),
    ("reflection_anticommutes_with_dunkl", reflection_anticommutation),
    ("dunkl_hermiticity", dunkl_hermiticity),
    ("gauge_transformed_dfp_equals_2h_plus", susy_gauge_identity),
    ("ladder_factorization", ladder_factorization),
    ("analytic_residual", analytic_residual),
    ("spectrum_mu_half", spectrum_mu_half),
    ("spectrum_mu_zero", spectrum_mu_zero),
    ("mu_zero_closed_form", mu_zero_closed_form),
    ("orthonormality_stationary_measure", orthonormality),
    ("gamma_moment", gamma_moment),
    ("mode_decay", mode_decay),
    ("decay_rate", decay_rate),
    ("ground_state_stationary", ground_state_stationary),
    ("evolution_parity", evolution_parity),
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.0).collect()
}

/// Runs every check, concurrently, in a fixed output order.
pub fn run_suite(suite: Suite) -> Vec<Check> {
    let work = || {
        CHECKS
            .par_iter()
            .map(|&(name, f)| {
                f(suite).unwrap_or_else(|e| Check {
                    name,
                    measured: f64::NAN,
                    tolerance: f64::NAN,
                    passed: false,
                    detail: format!("error: {e}"),
                })
            })
            .collect()
    };
    let threads = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok());
    match threads.filter(|&n| n > 0) {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(work),
            Err(_) => work(),
        },
        None => work(),
    }
}

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    let suite = Suite {
        quick: cfg.quick,
        negate: cfg.selftest_negate,
    };
    let checks = run_suite(suite);
    let header = cfg.echo(Command::Verify);
    let mut out = open_sink(cfg.output.as_deref())?;
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    match cfg.format {
        Format::Json => {
            let list: Vec<Value> = checks
                .iter()
                .map(|c| {
                    json!({
                        "name": c.name,
                        "measured": json_f64(c.measured),
                        "tolerance": json_f64(c.tolerance),
                        "passed": c.passed,
                        "detail": c.detail,
                    })
                })
                .collect();
            write_json(
                &mut *out,
                &json!({
                    "config": config_json(&header),
                    "grid_n": suite.grid_n(),
                    "checks": list,
                    "passed": failed.is_empty(),
                    "failed": failed,
                }),
            )?;
        }
        Format::Csv => {
            let mut t = Table::new(["check", "measured", "tolerance", "passed", "detail"].map(String::from).to_vec());
            for c in &checks {
                t.push(vec![
                    Cell::from(c.name),
                    c.measured.into(),
                    c.tolerance.into(),
                    c.passed.into(),
                    Cell::Text(c.detail.clone()),
                ]);
            }
            let trailer = [
                ("grid-n-used".to_string(), suite.grid_n().to_string()),
                ("passed".to_string(), failed.is_empty().to_string()),
            ];
            t.write_csv(&mut *out, &header, &trailer)?;
        }
    }
    drop(out);
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Tolerance(format!("failed checks: {}", failed.join(", "))))
    }
}

fn params(mu: f64) -> DunklParams {
    DunklParams::new(mu).expect("fixed mu is valid")
}

/// `-x - 0.3 x^3`: odd, regular, and not of the oscillator type.
pub fn cubic_drift() -> DriftSpec {
    DriftSpec::new(|x| -x - 0.3 * x * x * x, |x| -1.0 - 0.9 * x * x, DriftParity::Odd)
        .expect("cubic drift is odd")
}

/// Quartic polynomial times a shifted Gaussian, with seeded coefficients.
pub fn random_smooth(rng: &mut ChaCha8Rng, grid: GridSpec) -> GridFunction {
    let c: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let center = rng.gen_range(-0.8..0.8);
    let rate = rng.gen_range(0.5..1.0);
    GridFunction::sample(grid, |x| {
        let poly = c.iter().rev().fold(0.0, |acc, ck| acc * x + ck);
        poly * (-rate * (x - center) * (x - center)).exp()
    })
}

fn samples(grid: GridSpec, count: usize) -> Vec<GridFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    (0..count).map(|_| random_smooth(&mut rng, grid)).collect()
}

fn max_gap(a: &GridFunction, b: &GridFunction, keep: impl Fn(f64) -> bool) -> f64 {
    let grid = a.grid();
    (0..grid.n_points())
        .filter(|&j| keep(grid.x(j)))
        .map(|j| (a.values()[j] - b.values()[j]).abs())
        .fold(0.0, f64::max)
}

fn reflection_involution(s: Suite) -> Result<Check, CliError> {
    let worst = samples(s.grid(L), 5)
        .iter()
        .map(|f| max_gap(&reflect(&reflect(f)), f, |_| true))
        .fold(0.0, f64::max);
    Ok(Check::new("reflection_involution", worst, tol::REFLECTION, "max |R R f - f|"))
}

fn reflection_anticommutation(s: Suite) -> Result<Check, CliError> {
    let p = params(MU);
    let mut worst = 0.0_f64;
    for f in samples(s.grid(L), 5) {
        let lhs = dunkl_derivative(&reflect(&f), p);
        let rhs = reflect(&dunkl_derivative(&f, p));
        for (a, b) in lhs.values().iter().zip(rhs.values()) {
            worst = worst.max((a + b).abs() / (1.0 + b.abs()));
        }
    }
    Ok(Check::new(
        "reflection_anticommutes_with_dunkl",
        worst,
        tol::REFLECTION,
        "max |D R f + R D f| / (1 + |R D f|)",
    ))
}

fn dunkl_hermiticity(s: Suite) -> Result<Check, CliError> {
    let p = params(MU);
    let fs = samples(s.grid(L), 6);
    let mut worst = 0.0_f64;
    for pair in fs.chunks(2) {
        let (f, g) = (&pair[0], &pair[1]);
        let lhs = weighted_inner_product(&dunkl_derivative(f, p), g, p)?.value;
        let rhs = weighted_inner_product(f, &dunkl_derivative(g, p), p)?.value;
        worst = worst.max((lhs + rhs).abs());
    }
    Ok(Check::new(
        "dunkl_hermiticity",
        worst,
        s.fourth(tol::HERMITICITY),
        "max |<D f, g> + <f, D g>| in the |x|^{2 mu} measure",
    ))
}

fn susy_gauge_identity(s: Suite) -> Result<Check, CliError> {
    let grid = s.grid(6.0);
    let partner = if s.negate { Partner::Minus } else { Partner::Plus };
    // e^{-G} amplifies stencil error in the tails; compare where it is mild
    let cases = [(cubic_drift(), 2.0), (generalized_ho_drift(0.0), 4.0)];
    let mut worst = 0.0_f64;
    for (k, f) in samples(grid, tol::SUSY_SAMPLES).iter().enumerate() {
        let (w, window) = &cases[k % 2];
        let mu = 0.1 * (k % 10) as f64;
        let lhs = apply_gauge_transformed_dfp(f, w, params(mu))?;
        let rhs = apply_partner_hamiltonian(partner, f, w, params(mu))?.scaled(2.0);
        worst = worst.max(max_gap(&lhs, &rhs, |x| x.abs() <= *window));
    }
    let detail = if s.negate {
        "fault injected: compared against 2 H- instead of 2 H+"
    } else {
        "max |e^{-G} H e^{G} f - 2 H+ f| on 20 seeded functions"
    };
    Ok(Check::new(
        "gauge_transformed_dfp_equals_2h_plus",
        worst,
        s.fourth(tol::SUSY_POINTWISE),
        detail,
    ))
}

fn ladder_factorization(s: Suite) -> Result<Check, CliError> {
    let grid = s.grid(6.0);
    let w = cubic_drift();
    let mut worst = 0.0_f64;
    for (k, f) in samples(grid, tol::SUSY_SAMPLES).iter().enumerate() {
        let p = params(0.1 * (k % 10) as f64);
        let a = apply_susy_ladder(Ladder::A, f, &w, p)?;
        let ad = apply_susy_ladder(Ladder::ADagger, f, &w, p)?;
        let a_ad = apply_susy_ladder(Ladder::A, &ad, &w, p)?;
        let ad_a = apply_susy_ladder(Ladder::ADagger, &a, &w, p)?;
        let plus = apply_partner_hamiltonian(Partner::Plus, f, &w, p)?;
        let minus = apply_partner_hamiltonian(Partner::Minus, f, &w, p)?;
        worst = worst
            .max(max_gap(&a_ad, &plus, |_| true))
            .max(max_gap(&ad_a, &minus, |_| true));
    }
    Ok(Check::new(
        "ladder_factorization",
        worst,
        s.fourth(tol::SUSY_POINTWISE),
        "max of |A A+ f - H+ f| and |A+ A f - H- f|",
    ))
}

/// `max_n ||H psi_n - lambda_n psi_n||_inf / ||psi_n||_inf` over both sectors.
pub fn analytic_residual_at(grid: GridSpec, a: f64, mu: f64, n_max: usize) -> Result<f64, CliError> {
    let w = generalized_ho_drift(a);
    let p = params(mu);
    let mut worst = 0.0_f64;
    for sector in [Sector::Even, Sector::Odd] {
        let family = OscillatorFamily::new(a, mu, sector)?;
        for n in 0..=n_max {
            let sol = EigenSolution::new(family, n)?;
            let psi = sol.sample(grid);
            let h = apply_dfp_operator(&psi, &w, p)?;
            let r = h.axpy(-sol.lambda, &psi)?;
            worst = worst.max(r.max_abs() / psi.max_abs());
        }
    }
    Ok(worst)
}

fn analytic_residual(s: Suite) -> Result<Check, CliError> {
    let worst = analytic_residual_at(s.grid(L), A, MU, 5)?;
    Ok(Check::new(
        "analytic_residual",
        worst,
        s.fourth(tol::ANALYTIC_RESIDUAL),
        "closed forms n <= 5, both sectors",
    ))
}

/// Worst eigenvalue error (relative, absolute for the zero mode) over
/// `n <= n_max` in both sectors.
pub fn spectrum_error(grid: GridSpec, a: f64, mu: f64, n_max: usize) -> Result<f64, CliError> {
    let w = generalized_ho_drift(a);
    let mut worst = 0.0_f64;
    for sector in [Sector::Even, Sector::Odd] {
        let op = build_sector_operator(&w, params(mu), grid, sector)?;
        let spec = solve_spectrum(&op, n_max + 1)?;
        for (n, lam) in spec.eigenvalues.iter().enumerate() {
            let exact = 4.0 * n as f64;
            let err = if n == 0 { lam.abs() } else { (lam - exact).abs() / exact };
            worst = worst.max(err);
        }
    }
    Ok(worst)
}

fn spectrum_mu_half(s: Suite) -> Result<Check, CliError> {
    let worst = spectrum_error(s.grid(L), A, MU, 5)?;
    Ok(Check::new(
        "spectrum_mu_half",
        worst,
        tol::EIGENVALUE_RELATIVE,
        "lambda_n = 4n, n <= 5, both sectors",
    ))
}

fn spectrum_mu_zero(s: Suite) -> Result<Check, CliError> {
    let worst = spectrum_error(s.grid(L), A, 0.0, 5)?;
    Ok(Check::new(
        "spectrum_mu_zero",
        worst,
        tol::EIGENVALUE_RELATIVE,
        "lambda_n = 4n at mu = 0",
    ))
}

fn mu_zero_closed_form(s: Suite) -> Result<Check, CliError> {
    let grid = s.grid(L);
    let family = OscillatorFamily::new(A, 0.0, Sector::Even)?;
    let mut worst = 0.0_f64;
    for n in 0..=5 {
        let sol = EigenSolution::new(family, n)?;
        for x in grid.nodes() {
            let (classical, _) = classical_fpe_solution(A, n, x)?;
            worst = worst.max((sol.eval(x) - classical).abs());
        }
    }
    Ok(Check::new(
        "mu_zero_closed_form",
        worst,
        tol::MU_ZERO_POINTWISE,
        "even closed form at mu = 0 against the classical solution",
    ))
}

fn orthonormality(_: Suite) -> Result<Check, CliError> {
    let mut worst = 0.0_f64;
    for sector in [Sector::Even, Sector::Odd] {
        let g = gram_matrix(&OscillatorFamily::new(A, MU, sector)?, 5, GramWeight::Stationary)?;
        for (i, row) in g.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((v - target).abs());
            }
        }
    }
    Ok(Check::new(
        "orthonormality_stationary_measure",
        worst,
        tol::GRAM_IDENTITY,
        "Gram matrix n, m <= 5 with weight |x|^{2 mu} / rho",
    ))
}

fn gamma_moment(s: Suite) -> Result<Check, CliError> {
    let f = GridFunction::sample(s.grid(L), |x| (-x * x).exp() * x * x);
    let v = weighted_inner_product(&f, &f, params(0.5))?.value;
    Ok(Check::new(
        "gamma_moment",
        (v - 0.25).abs(),
        s.fourth(tol::GAMMA_MOMENT),
        "grid quadrature of <e^{-x^2} x^2, e^{-x^2} x^2> at mu = 1/2 against 1/4",
    ))
}

/// Relative weighted-L2 distance between `psi_1` evolved to `t` and
/// `e^{-4 t} psi_1`.
pub fn mode_decay_error(grid: GridSpec, t: f64, dt: f64) -> Result<f64, CliError> {
    let p = params(MU);
    let sol = EigenSolution::new(OscillatorFamily::new(A, MU, Sector::Even)?, 1)?;
    let psi = sol.sample(grid).forget_analytic();
    let state = evolve(&psi, &generalized_ho_drift(A), p, t, dt)?;
    let expected = psi.scaled((-sol.lambda * t).exp());
    Ok(weighted_norm(&state.density.sub(&expected)?, p)? / weighted_norm(&expected, p)?)
}

fn mode_decay(s: Suite) -> Result<Check, CliError> {
    let err = mode_decay_error(s.grid(L), 0.1, 1e-4)?;
    Ok(Check::new(
        "mode_decay",
        err,
        s.second(tol::DECAY_RELATIVE_L2),
        "even psi_1 to t = 0.1 at dt = 1e-4 against e^{-0.4} psi_1",
    ))
}

/// Fitted rate of the weighted norm of `psi_1` sampled every 0.01 up to `t`.
pub fn fitted_decay_rate(grid: GridSpec, t: f64, dt: f64) -> Result<f64, CliError> {
    let p = params(MU);
    let sol = EigenSolution::new(OscillatorFamily::new(A, MU, Sector::Even)?, 1)?;
    let psi = sol.sample(grid).forget_analytic();
    let evolver = Evolver::new(&generalized_ho_drift(A), p, grid, dt)?;
    let mut run = evolver.start(&psi)?;
    let every = ((0.01 / dt).round() as usize).max(1);
    let steps = (t / dt).round() as usize;
    let mut trace = vec![(0.0, weighted_norm(&psi, p)?)];
    for k in 1..=steps {
        run.step()?;
        if k % every == 0 {
            trace.push((k as f64 * dt, weighted_norm(&run.state().density, p)?));
        }
    }
    Ok(decay_rate_estimate(&trace)?.rate)
}

fn decay_rate(s: Suite) -> Result<Check, CliError> {
    let rate = fitted_decay_rate(s.grid(L), 0.1, 1e-4)?;
    Ok(Check::new(
        "decay_rate",
        (rate - 4.0).abs() / 4.0,
        tol::DECAY_RATE_RELATIVE,
        format!("fitted rate {rate:.8} against 4"),
    ))
}

fn ground_state_stationary(s: Suite) -> Result<Check, CliError> {
    let grid = s.grid(L);
    let p = params(MU);
    let psi = EigenSolution::new(OscillatorFamily::new(A, MU, Sector::Even)?, 0)?
        .sample(grid)
        .forget_analytic();
    let dt = if s.quick { 1e-3 } else { 1e-4 };
    let state = evolve(&psi, &generalized_ho_drift(A), p, 1.0, dt)?;
    let drift = state.density.sub(&psi)?.max_abs() / psi.max_abs();
    Ok(Check::new(
        "ground_state_stationary",
        drift,
        tol::STATIONARY_DRIFT,
        "max |P(1) - psi_0| / max |psi_0|",
    ))
}

fn evolution_parity(s: Suite) -> Result<Check, CliError> {
    let grid = s.grid(L);
    let w = generalized_ho_drift(A);
    let bump = GridFunction::sample(grid, |x| (-(x - 0.7) * (x - 0.7)).exp());
    let mut worst = 0.0_f64;
    for parity in [Parity::Even, Parity::Odd] {
        let state = evolve(&bump.clone().projected(parity), &w, params(MU), 0.1, 1e-3)?;
        let raw = GridFunction::new(grid, state.density.values().to_vec())?;
        worst = worst.max(raw.parity_defect(parity) / raw.max_abs());
    }
    Ok(Check::new(
        "evolution_parity",
        worst,
        tol::EVOLUTION_PARITY,
        "relative parity defect after t = 0.1 from even and odd data",
    ))
}
