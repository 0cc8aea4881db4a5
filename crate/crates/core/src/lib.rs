//! Numerical laboratory for central limit theorems: classical, martingale and
//! nonlinear (sublinear-expectation) versions.
//!
//! The crate is organised bottom-up:
//!
//! - [`numerics`]: normal functions, quadrature, seeded random streams, KS statistics.
//! - [`densities`]: the two explicit nonlinear normal densities and the rules that pick
//!   their parameters from an uncertainty interval and a test-function shape.
//! - [`classical`]: De Moivre–Laplace, Laplace's approximation, Lyapunov/Lindeberg/Feller.
//! - [`martingale`]: martingale-difference models and the Lévy, Brown, McLeish and Hall checks.
//! - [`sublinear`]: G-heat and g-expectation solvers, S-shaped terminals, lattice oracle.
//! - [`measure_set`]: adversarial dynamic programming over rectangular sets of measures.
//! - [`cli`]: configuration, validation and CSV output for the `nlclt` binary.
//!
//! With the default `parallel` feature the data-parallel loops (Monte Carlo blocks,
//! per-step grid updates, parameter sweeps) run on rayon; without it the same code
//! runs sequentially and produces bit-identical results.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod classical;
pub mod cli;
pub mod densities;
mod error;
pub mod martingale;
pub mod measure_set;
pub mod numerics;
pub mod parallel;
pub mod report;
pub mod sublinear;

pub use error::{Error, Result};
