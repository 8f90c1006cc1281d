use std::process::{Command, Output};

fn dunkl_fpe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dunkl-fpe"))
        .args(args)
        .env("DUNKL_FPE_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn mu_below_the_bound_is_a_config_error() {
    let o = dunkl_fpe(&["spectrum", "--mu", "-0.6"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("mu > -1/2"));
}

#[test]
fn spectrum_table_has_the_four_n_column() {
    let o = dunkl_fpe(&["spectrum", "--parity", "even", "--grid-n", "801", "--assert-tol", "5e-3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let analytic: Vec<f64> = text
        .lines()
        .filter(|l| l.starts_with("even,"))
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert_eq!(analytic, vec![0.0, 4.0, 8.0, 12.0, 16.0, 20.0]);
}

#[test]
fn tolerance_breach_exits_two() {
    let o = dunkl_fpe(&["spectrum", "--grid-n", "201", "--assert-tol", "1e-9"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_catches_the_injected_fault() {
    let o = dunkl_fpe(&["verify", "--quick", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = dunkl_fpe(&["verify", "--quick", "--selftest-negate", "--format", "json"]);
    assert_eq!(o.status.code(), Some(2));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["passed"], false);
    assert_eq!(report["failed"], serde_json::json!(["gauge_transformed_dfp_equals_2h_plus"]));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    for args in [
        &["eigfun", "--grid-n", "101", "--n-max", "2"][..],
        &["eigfun", "--grid-n", "101", "--n-max", "1", "--format", "json", "--normalize"][..],
        &["evolve", "--grid-n", "101", "--t-final", "0.05", "--dt", "1e-3", "--sample-every", "10"][..],
    ] {
        let a = dunkl_fpe(args);
        let b = dunkl_fpe(args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn header_echoes_every_flag() {
    let o = dunkl_fpe(&["eigfun", "--grid-n", "101", "--mu", "0.5", "--parity", "odd", "--n-max", "1"]);
    let text = stdout(&o);
    for key in ["command=eigfun", "a=1", "mu=0.5", "parity=odd", "n-max=1", "grid-n=101", "domain-l=8", "normalize=false"] {
        assert!(text.lines().any(|l| l == format!("# {key}")), "missing {key}");
    }
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "x,psi_odd_0,psi_odd_1");
    // odd curves vanish at the origin: the row with x = 0
    let origin = text.lines().find(|l| l.starts_with("0.0000000000000000e0,")).unwrap();
    assert!(origin.split(',').skip(1).all(|v| v.parse::<f64>().unwrap() == 0.0));
}

#[test]
fn evolve_trace_ends_with_the_fitted_rate() {
    let o = dunkl_fpe(&[
        "evolve", "--initial", "mode:1:even", "--grid-n", "801", "--t-final", "0.5", "--dt", "1e-3",
        "--sample-every", "50",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rate: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("# decay-rate="))
        .unwrap()
        .parse()
        .unwrap();
    assert!((rate - 4.0).abs() < 0.04, "{rate}");
}

#[test]
fn stationary_mode_keeps_its_norm() {
    let o = dunkl_fpe(&[
        "evolve", "--initial", "mode:0:even", "--grid-n", "401", "--t-final", "0.2", "--dt", "1e-3",
        "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let norms: Vec<f64> = v["samples"].as_array().unwrap().iter().map(|s| s["norm"].as_f64().unwrap()).collect();
    let first = norms[0];
    assert!(norms.iter().all(|n| (n - first).abs() <= 1e-6 * first));
    assert_eq!(v["decay"]["degenerate"], true);
}

#[test]
fn bad_initial_selector_is_a_config_error() {
    let o = dunkl_fpe(&["evolve", "--initial", "sine:3", "--grid-n", "101"]);
    assert_eq!(o.status.code(), Some(1));
}
