//! Fourth-order finite differences on the symmetric grid.
//!
//! Interior nodes use central stencils written as differences of mirrored
//! pairs, and the two closure nodes at each end use one-sided stencils that
//! are exact mirror images of each other. Together this makes
//! `d/dx (R f) = -R (d/dx f)` hold bit for bit.

use alloc::vec::Vec;

fn forward_first(f: [f64; 5]) -> f64 {
    -25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]
}

fn shifted_first(f: [f64; 5]) -> f64 {
    -3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]
}

fn forward_second(f: [f64; 6]) -> f64 {
    45.0 * f[0] - 154.0 * f[1] + 214.0 * f[2] - 156.0 * f[3] + 61.0 * f[4] - 10.0 * f[5]
}

fn shifted_second(f: [f64; 6]) -> f64 {
    10.0 * f[0] - 15.0 * f[1] - 4.0 * f[2] + 14.0 * f[3] - 6.0 * f[4] + f[5]
}

fn window<const K: usize>(v: &[f64], start: usize) -> [f64; K] {
    core::array::from_fn(|i| v[start + i])
}

fn window_rev<const K: usize>(v: &[f64], end: usize) -> [f64; K] {
    core::array::from_fn(|i| v[end - i])
}

pub(crate) fn first_derivative(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    let scale = 12.0 * h;
    (0..n)
        .map(|j| {
            let s = match j {
                0 => forward_first(window(v, 0)),
                1 => shifted_first(window(v, 0)),
                _ if j == n - 2 => -shifted_first(window_rev(v, n - 1)),
                _ if j == n - 1 => -forward_first(window_rev(v, n - 1)),
                _ => 8.0 * (v[j + 1] - v[j - 1]) - (v[j + 2] - v[j - 2]),
            };
            s / scale
        })
        .collect()
}

pub(crate) fn second_derivative(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    let scale = 12.0 * h * h;
    (0..n)
        .map(|j| {
            let s = match j {
                0 => forward_second(window(v, 0)),
                1 => shifted_second(window(v, 0)),
                _ if j == n - 2 => shifted_second(window_rev(v, n - 1)),
                _ if j == n - 1 => forward_second(window_rev(v, n - 1)),
                _ => 16.0 * (v[j + 1] + v[j - 1]) - (v[j + 2] + v[j - 2]) - 30.0 * v[j],
            };
            s / scale
        })
        .collect()
}

/// Replaces the origin sample by its limit, extrapolated from the even part
/// at `x = h, ..., 4h` as a cubic in `x^2`. The odd part vanishes there.
pub(crate) fn fill_origin_limit(v: &mut [f64], center: usize) {
    let even = |k: usize| 0.5 * (v[center + k] + v[center - k]);
    v[center] = (56.0 * even(1) - 28.0 * even(2) + 8.0 * even(3) - even(4)) / 35.0;
}

/// `g(x) / x` for odd samples `g`, with the origin value taken as the limit.
pub(crate) fn divide_odd_by_x(g: &[f64], nodes: &[f64], center: usize) -> Vec<f64> {
    let mut q: Vec<f64> = g
        .iter()
        .zip(nodes)
        .map(|(v, x)| if *x == 0.0 { 0.0 } else { v / x })
        .collect();
    fill_origin_limit(&mut q, center);
    q
}
