//! Compressed sensing with mixed symmetric random measurement matrices.
//!
//! Matrices come from random-graph models whose loop weights and edge
//! weights follow different laws. The crate estimates their restricted
//! isometry constants, recovers sparse signals by ℓ1 minimization and runs
//! the success-rate and image reconstruction benchmarks.

pub mod cli;
pub mod distributions;
pub mod ensembles;
pub mod error;
pub mod experiments;
pub mod io;
pub mod linalg;
pub mod rip;
pub mod solver;
pub mod spectral;
pub mod rng;

pub use error::{Error, Result};
