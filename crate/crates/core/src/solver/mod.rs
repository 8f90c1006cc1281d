//! Numerical eigensolver and time integrator for the Dunkl-Fokker-Planck
//! equation with an odd drift.
//!
//! Odd drifts commute with the reflection, so each parity sector is a local
//! half-line problem. The full-line operator in [`crate::dunkl`] stays
//! independent and is used only to check the results.

mod decay;
mod evolve;
mod sector;
mod spectrum;

pub use decay::{decay_rate_estimate, DecayFit};
pub use evolve::{evolve, EvolutionRun, EvolutionState, Evolver};
pub use sector::{build_sector_operator, DiscretizedOperator};
pub use spectrum::{solve_spectrum, SpectralResult};
