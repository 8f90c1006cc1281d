//! Symmetric tridiagonal eigenproblems and banded solves.
//!
//! Everything the crate needs from linear algebra is tridiagonal: the Jacobi
//! matrices behind Gauss rules and the three-point sector operators.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::sqrt;

/// Real symmetric tridiagonal matrix stored as its diagonal and first off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::InvalidParameter {
                name: "off.len()",
                value: off.len() as f64,
                reason: "off-diagonal must be one shorter than the diagonal",
            });
        }
        Ok(Self { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s += self.off[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * v[i + 1];
                }
                s
            })
            .collect()
    }

    /// Number of eigenvalues strictly less than `x` (Sturm sequence count).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.dim() {
            let coupling = if i == 0 {
                0.0
            } else {
                self.off[i - 1] * self.off[i - 1]
            };
            q = self.diag[i] - x - if i == 0 { 0.0 } else { coupling / q };
            if q == 0.0 {
                q = -f64::EPSILON * (self.diag[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// The `index`-th smallest eigenvalue (0-based) by bisection on the Sturm count.
    pub fn eigenvalue_by_bisection(&self, index: usize) -> Result<f64> {
        if index >= self.dim() {
            return Err(Error::InvalidParameter {
                name: "index",
                value: index as f64,
                reason: "eigenvalue index exceeds matrix dimension",
            });
        }
        let (mut lo, mut hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        lo -= 4.0 * f64::EPSILON * scale;
        hi += 4.0 * f64::EPSILON * scale;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 2.0 * f64::EPSILON * scale {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Eigenvector for an accurately known eigenvalue via inverse iteration.
    ///
    /// `previous` holds already computed eigenvectors that the result is kept
    /// orthogonal to. Returns a unit vector.
    pub fn eigenvector_by_inverse_iteration(
        &self,
        lambda: f64,
        previous: &[Vec<f64>],
    ) -> Result<Vec<f64>> {
        const MAX_ITERATIONS: usize = 8;
        let n = self.dim();
        let scale = self
            .diag
            .iter()
            .chain(self.off.iter())
            .fold(0.0_f64, |m, v| m.max(v.abs()))
            .max(f64::MIN_POSITIVE);
        let shift = lambda + 8.0 * f64::EPSILON * scale;
        let shifted = Tridiagonal {
            lower: self.off.clone(),
            diag: self.diag.iter().map(|d| d - shift).collect(),
            upper: self.off.clone(),
        };
        let lu = shifted.factor()?;
        // deterministic, non-symmetric start vector
        let mut v: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * (((i * 7919) % 101) as f64 / 101.0))
            .collect();
        normalize(&mut v);
        let mut residual = f64::INFINITY;
        for iteration in 0..MAX_ITERATIONS {
            let mut next = lu.solve(&v);
            for p in previous {
                let d = dot(&next, p);
                for (x, y) in next.iter_mut().zip(p) {
                    *x -= d * y;
                }
            }
            normalize(&mut next);
            v = next;
            let av = self.mul_vec(&v);
            residual = av
                .iter()
                .zip(&v)
                .map(|(a, x)| (a - lambda * x).abs())
                .fold(0.0, f64::max);
            if iteration >= 1 && residual <= 1e3 * f64::EPSILON * scale {
                return Ok(v);
            }
        }
        if residual <= 1e6 * f64::EPSILON * scale {
            Ok(v)
        } else {
            Err(Error::Convergence {
                what: "inverse iteration",
                iterations: MAX_ITERATIONS,
                residual,
            })
        }
    }

    /// All eigenvalues (ascending) together with the first component of each
    /// normalized eigenvector, by implicit QL with Wilkinson shifts.
    ///
    /// Only the first row of the eigenvector matrix is tracked, which is all a
    /// Golub-Welsch construction needs.
    pub fn eigen_first_components(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        const MAX_SWEEPS: usize = 60;
        let n = self.dim();
        let mut d = self.diag.clone();
        let mut e = vec![0.0; n];
        e[..n - 1].copy_from_slice(&self.off);
        let mut z = vec![0.0; n];
        z[0] = 1.0;

        for l in 0..n {
            let mut iterations = 0;
            loop {
                let mut m = l;
                while m + 1 < n {
                    let dd = d[m].abs() + d[m + 1].abs();
                    if e[m].abs() <= f64::EPSILON * dd {
                        break;
                    }
                    m += 1;
                }
                if m == l {
                    break;
                }
                iterations += 1;
                if iterations > MAX_SWEEPS {
                    return Err(Error::Convergence {
                        what: "implicit QL",
                        iterations,
                        residual: e[l].abs(),
                    });
                }
                let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                let mut r = libm::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + r.copysign(g));
                let mut s = 1.0;
                let mut c = 1.0;
                let mut p = 0.0;
                let mut i = m;
                let mut underflow = false;
                while i > l {
                    i -= 1;
                    let f = s * e[i];
                    let b = c * e[i];
                    r = libm::hypot(f, g);
                    e[i + 1] = r;
                    if r == 0.0 {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    let zf = z[i + 1];
                    z[i + 1] = s * z[i] + c * zf;
                    z[i] = c * z[i] - s * zf;
                }
                if underflow {
                    continue;
                }
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
        Ok((
            order.iter().map(|&i| d[i]).collect(),
            order.iter().map(|&i| z[i]).collect(),
        ))
    }
}

/// General tridiagonal matrix; `lower[i]` sits at (i+1, i) and `upper[i]` at (i, i+1).
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s += self.lower[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.upper[i] * v[i + 1];
                }
                s
            })
            .collect()
    }

    /// LU factorization with partial pivoting (one extra superdiagonal of fill).
    pub fn factor(&self) -> Result<TridiagonalLu> {
        let n = self.dim();
        let mut d = self.diag.clone();
        let mut du = self.upper.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut dl = self.lower.clone();
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    return Err(Error::SingularPivot { row: i });
                }
                let f = dl[i] / d[i];
                dl[i] = f;
                d[i + 1] -= f * du[i];
            } else {
                let f = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = f;
                let tmp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = tmp - f * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -f;
                }
                swapped[i] = true;
            }
        }
        if n > 0 && d[n - 1] == 0.0 {
            return Err(Error::SingularPivot { row: n - 1 });
        }
        Ok(TridiagonalLu {
            dl,
            d,
            du,
            du2,
            swapped,
        })
    }
}

/// Factored tridiagonal system, reusable across right-hand sides.
#[derive(Debug, Clone)]
pub struct TridiagonalLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagonalLu {
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.d.len();
        let mut x = rhs.to_vec();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                x.swap(i, i + 1);
            }
            x[i + 1] -= self.dl[i] * x[i];
        }
        if n == 0 {
            return x;
        }
        x[n - 1] /= self.d[n - 1];
        if n > 1 {
            x[n - 2] = (x[n - 2] - self.du[n - 2] * x[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            x[i] = (x[i] - self.du[i] * x[i + 1] - self.du2[i] * x[i + 2]) / self.d[i];
        }
        x
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn normalize(v: &mut [f64]) {
    let norm = sqrt(dot(v, v));
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}
