use crate::error::{Error, Result};
use crate::math::{ln, sqrt};

/// Least-squares fit of `ln ||P|| = b - rate * t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub rate: f64,
    /// Root-mean-square deviation of `ln ||P||` from the fitted line.
    pub residual: f64,
    /// The trace is constant to rounding; `rate` is then reported as 0.
    pub degenerate: bool,
}

/// Fits an exponential decay rate to `(time, norm)` samples.
pub fn decay_rate_estimate(trace: &[(f64, f64)]) -> Result<DecayFit> {
    if trace.len() < 3 {
        return Err(Error::DegenerateFit("need at least three samples"));
    }
    if trace.iter().any(|&(t, n)| !(t.is_finite() && n.is_finite() && n > 0.0)) {
        return Err(Error::DegenerateFit("norms must be finite and positive"));
    }
    let k = trace.len() as f64;
    let t_mean = trace.iter().map(|s| s.0).sum::<f64>() / k;
    let y_mean = trace.iter().map(|s| ln(s.1)).sum::<f64>() / k;
    let stt: f64 = trace.iter().map(|s| (s.0 - t_mean) * (s.0 - t_mean)).sum();
    if stt == 0.0 {
        return Err(Error::DegenerateFit("all samples share one time"));
    }
    let sty: f64 = trace.iter().map(|s| (s.0 - t_mean) * (ln(s.1) - y_mean)).sum();
    let spread = trace
        .iter()
        .map(|s| (ln(s.1) - y_mean).abs())
        .fold(0.0, f64::max);
    if spread <= 1e-12 {
        return Ok(DecayFit {
            rate: 0.0,
            residual: 0.0,
            degenerate: true,
        });
    }
    let slope = sty / stt;
    let intercept = y_mean - slope * t_mean;
    let sq: f64 = trace
        .iter()
        .map(|s| {
            let r = ln(s.1) - (intercept + slope * s.0);
            r * r
        })
        .sum();
    Ok(DecayFit {
        rate: -slope,
        residual: sqrt(sq / k),
        degenerate: false,
    })
}
