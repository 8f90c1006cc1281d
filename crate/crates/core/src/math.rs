//! Thin shim over `libm` so the rest of the crate reads like ordinary float code.

pub(crate) use libm::{exp, log as ln, pow as powf, sin, sqrt};

pub(crate) const PI: f64 = core::f64::consts::PI;

/// `|x|^p` with the conventions `0^0 = 1` and `0^p = 0` for `p > 0`.
pub(crate) fn abs_pow(x: f64, p: f64) -> f64 {
    if p == 0.0 {
        1.0
    } else {
        powf(x.abs(), p)
    }
}
