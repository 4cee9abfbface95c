//! Exact comparison of the full and rotating-wave dynamics of two coupled bosonic modes.
//!
//! The crate works in the Gaussian (symplectic) picture: evolutions are 4×4 symplectic
//! matrices, states are covariance matrices, and the fidelity between the full and the
//! rotating-wave evolved states follows from a single effective Bogoliubov block.
//! A truncated Fock-space propagator provides an independent brute-force check.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod fockoracle;
pub mod matcore;
pub mod metrics;
pub mod perturbation;
pub mod states;

pub use error::{Error, Result};
