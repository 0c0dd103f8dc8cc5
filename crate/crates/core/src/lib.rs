//! Quantum channels, their superoperator spectra, and comparisons with the
//! real Ginibre ensemble.
//!
//! The crate is organised bottom-up:
//!
//! * [`matrix`]: dense complex/real matrices, structured unitaries, Haar
//!   sampling and LAPACK-backed eigensolvers.
//! * [`channels`]: Kraus sets, superoperators, Choi matrices, the real Bloch
//!   representation and invariant states.
//! * [`baker`]: measured (sloppy) quantum baker maps.
//! * [`ensembles`]: random channel ensembles and the real Ginibre sampler.
//! * [`spectral`]: spectrum reports, densities and real-eigenvalue statistics.
//! * [`dynamics`]: relaxation of random pure states towards the invariant state.
//! * [`experiment`]: config-driven, reproducible sweeps writing CSV artifacts.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baker;
pub mod channels;
pub mod dynamics;
pub mod ensembles;
mod error;
pub mod experiment;
pub mod matrix;
pub mod rng;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};
pub use num_complex::Complex64;
