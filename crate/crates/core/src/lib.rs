//! Dunkl-Fokker-Planck equation in one dimension: exact Laguerre
//! eigenfunctions, a parity-sector eigensolver, an implicit time integrator
//! and the supersymmetric operator algebra.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

mod math;

pub mod analytic;
pub mod drift;
pub mod dunkl;
pub mod error;
pub mod linalg;
pub mod solver;
pub mod special_fn;

pub use drift::{generalized_ho_drift, DriftParity, DriftSpec};
pub use analytic::{EigenSolution, OscillatorFamily};
pub use dunkl::{DunklParams, GridFunction, GridSpec, Parity, Sector};
pub use error::{Error, Result};
pub use solver::{build_sector_operator, evolve, solve_spectrum, DiscretizedOperator, EvolutionState, SpectralResult};
