//! Pass/fail thresholds shared by `verify` and the acceptance suite.
//!
//! Full-resolution values assume `L = 8`, `N = 2001`. Quick mode runs at
//! `N = 501`, so `h` grows by four: fourth-order quantities get 4^4 = 256
//! times the budget, second-order ones 4^2 = 16.

/// Relative eigenvalue error for `lambda > 0`.
pub const EIGENVALUE_RELATIVE: f64 = 5e-3;

/// Absolute eigenvalue error for the zero mode.
pub const EIGENVALUE_ABSOLUTE_ZERO: f64 = 5e-3;

/// `||H psi_n - lambda_n psi_n||_inf / ||psi_n||_inf` on the closed forms.
pub const ANALYTIC_RESIDUAL: f64 = 5e-6;

/// Pointwise gap between the `mu = 0` closed form and the classical solution.
pub const MU_ZERO_POINTWISE: f64 = 1e-14;

/// `e^{-G} H e^{G} = 2 H+` and the ladder factorizations, pointwise.
pub const SUSY_POINTWISE: f64 = 1e-6;

/// Random smooth test functions for the operator identities.
pub const SUSY_SAMPLES: usize = 20;

/// Entrywise distance of a Gram matrix from the identity.
pub const GRAM_IDENTITY: f64 = 1e-8;

/// `<e^{-x^2} x^2, e^{-x^2} x^2>` at `mu = 1/2` against `1/4`.
pub const GAMMA_MOMENT: f64 = 1e-10;

/// Relative weighted-L2 error of an evolved mode against its decayed start.
pub const DECAY_RELATIVE_L2: f64 = 1e-4;

/// Relative error of the fitted decay rate.
pub const DECAY_RATE_RELATIVE: f64 = 1e-2;

/// Relative drift of the stationary mode over `t = 1`.
pub const STATIONARY_DRIFT: f64 = 1e-6;

/// Minimum log-log slope under refinement.
pub const CONVERGENCE_SLOPE: f64 = 1.9;

/// Parity defect of emitted curves.
pub const PARITY_DEFECT: f64 = 1e-14;

/// `R^2 = 1` and `D R = -R D` hold to rounding.
pub const REFLECTION: f64 = 1e-12;

/// `<D f, g> + <f, D g>` in the `|x|^{2 mu}` measure.
pub const HERMITICITY: f64 = 1e-6;

/// Parity defect of an evolved density relative to its maximum.
pub const EVOLUTION_PARITY: f64 = 1e-12;

pub const QUICK_FOURTH_ORDER: f64 = 256.0;
pub const QUICK_SECOND_ORDER: f64 = 16.0;
