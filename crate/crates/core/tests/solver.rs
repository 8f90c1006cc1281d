use dunkl_fpe_core::analytic::{EigenSolution, OscillatorFamily};
use dunkl_fpe_core::dunkl::weighted_norm;
use dunkl_fpe_core::solver::Evolver;
use dunkl_fpe_core::{
    build_sector_operator, evolve, generalized_ho_drift, solve_spectrum, DunklParams, GridFunction,
    GridSpec, Parity, Sector,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sector_operator_is_symmetric_in_the_mass_inner_product(
        a in 0.0f64..2.5,
        mu in -0.4f64..2.0,
        odd in any::<bool>(),
    ) {
        let grid = GridSpec::new(7.0, 801).unwrap();
        let sector = if odd { Sector::Odd } else { Sector::Even };
        let w = generalized_ho_drift(a);
        if let Ok(op) = build_sector_operator(&w, DunklParams::new(mu).unwrap(), grid, sector) {
            prop_assert!(op.symmetry_defect() < 1e-10);
            prop_assert!(op.weights().iter().all(|m| *m > 0.0));
        }
    }

    #[test]
    fn evolution_keeps_the_parity_of_its_data(
        center in 0.0f64..1.0,
        width in 0.5f64..1.5,
        mu in 0.0f64..1.5,
        odd in any::<bool>(),
    ) {
        let grid = GridSpec::new(6.0, 401).unwrap();
        let w = generalized_ho_drift(1.0);
        let bump = GridFunction::sample(grid, |x| {
            (-(x - center) * (x - center) / (width * width)).exp()
        });
        let parity = if odd { Parity::Odd } else { Parity::Even };
        let initial = bump.projected(parity);
        let state = evolve(&initial, &w, DunklParams::new(mu).unwrap(), 0.05, 1e-3).unwrap();
        let raw = GridFunction::new(grid, state.density.values().to_vec()).unwrap();
        prop_assert!(raw.parity_defect(parity) < 1e-10 * (1.0 + raw.max_abs()));
    }
}

#[test]
fn oscillator_spectrum_is_four_n_in_both_sectors() {
    let grid = GridSpec::new(8.0, 1001).unwrap();
    let w = generalized_ho_drift(1.0);
    for sector in [Sector::Even, Sector::Odd] {
        let op = build_sector_operator(&w, DunklParams::new(0.5).unwrap(), grid, sector).unwrap();
        let spec = solve_spectrum(&op, 6).unwrap();
        for (n, lam) in spec.eigenvalues.iter().enumerate() {
            let exact = 4.0 * n as f64;
            assert!((lam - exact).abs() <= 5e-3_f64.max(5e-3 * exact), "{sector:?} n={n}: {lam}");
        }
    }
}

#[test]
fn numerical_modes_track_the_closed_forms() {
    let grid = GridSpec::new(8.0, 1001).unwrap();
    let p = DunklParams::new(0.5).unwrap();
    let w = generalized_ho_drift(1.0);
    for sector in [Sector::Even, Sector::Odd] {
        let op = build_sector_operator(&w, p, grid, sector).unwrap();
        let spec = solve_spectrum(&op, 3).unwrap();
        let family = OscillatorFamily::new(1.0, 0.5, sector).unwrap();
        for (n, numeric) in spec.eigenfunctions.iter().enumerate() {
            let exact = EigenSolution::new(family, n).unwrap().sample(grid);
            // eigenvectors are fixed only up to sign
            let plus = numeric.sub(&exact).unwrap().max_abs();
            let minus = numeric.axpy(1.0, &exact).unwrap().max_abs();
            assert!(plus.min(minus) < 1e-3, "{sector:?} n={n}: {plus} {minus}");
            let norm = weighted_norm(numeric, p).unwrap();
            assert!((norm - 1.0).abs() < 1e-3);
        }
    }
}

#[test]
fn stepping_by_hand_matches_evolve() {
    let grid = GridSpec::new(6.0, 401).unwrap();
    let p = DunklParams::new(0.5).unwrap();
    let w = generalized_ho_drift(1.0);
    let initial = GridFunction::sample(grid, |x| (-(x - 0.4) * (x - 0.4)).exp());
    let evolver = Evolver::new(&w, p, grid, 0.01).unwrap();
    let mut run = evolver.start(&initial).unwrap();
    for _ in 0..10 {
        run.step().unwrap();
    }
    let manual = run.state();
    let direct = evolve(&initial, &w, p, 0.1, 0.01).unwrap();
    assert_eq!(manual.step_count, direct.step_count);
    assert!(manual.density.sub(&direct.density).unwrap().max_abs() < 1e-13);
}

#[test]
fn even_initial_data_relax_toward_the_ground_state() {
    // both sectors carry a zero mode, so the data must be even to single out psi_0
    let grid = GridSpec::new(8.0, 801).unwrap();
    let p = DunklParams::new(0.5).unwrap();
    let w = generalized_ho_drift(1.0);
    let initial = GridFunction::sample(grid, |x| (-x * x).exp());
    let state = evolve(&initial, &w, p, 2.0, 1e-2).unwrap();
    let ground = EigenSolution::new(OscillatorFamily::new(1.0, 0.5, Sector::Even).unwrap(), 0)
        .unwrap()
        .sample(grid);
    let cosine = {
        let d = state.density.values();
        let g = ground.values();
        let dot: f64 = d.iter().zip(g).map(|(a, b)| a * b).sum();
        let nd: f64 = d.iter().map(|a| a * a).sum::<f64>().sqrt();
        let ng: f64 = g.iter().map(|a| a * a).sum::<f64>().sqrt();
        dot / (nd * ng)
    };
    assert!(cosine >= 0.999, "{cosine}");
}
