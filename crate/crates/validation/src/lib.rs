//! One line per acceptance criterion.
//!
//! Lines go straight to the stderr handle rather than through `eprintln!`,
//! so the test harness does not capture them and they show up in plain
//! `cargo test` output.

use std::io::Write;

/// Writes `PASS criterion <id>: <summary>` (or `FAIL`) and returns `passed`.
pub fn report(id: u32, passed: bool, summary: &str) -> bool {
    let verdict = if passed { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{verdict} criterion {id}: {summary}");
    passed
}

/// Least-squares slope of `log2(err)` against `-log2(h)` over the levels.
pub fn observed_order(steps: &[f64], errors: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = steps
        .iter()
        .zip(errors)
        .map(|(h, e)| (-h.log2(), e.log2()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    -sxy / sxx
}

/// Slopes between consecutive levels.
pub fn pairwise_orders(steps: &[f64], errors: &[f64]) -> Vec<f64> {
    steps
        .windows(2)
        .zip(errors.windows(2))
        .map(|(h, e)| (e[0] / e[1]).log2() / (h[0] / h[1]).log2())
        .collect()
}
