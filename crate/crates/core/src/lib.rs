//! Fractional calculus toolkit.
//!
//! Mittag-Leffler functions, Riemann-Liouville / Caputo / Grünwald-Letnikov
//! operators on uniform grids, Laplace-transform verification, closed-form
//! solvers for linear fractional Cauchy problems, linear viscoelastic models
//! and the fractional harmonic oscillator.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod mittag_leffler;
mod quadrature;

pub use error::{Error, Result};
pub mod fde;
pub mod fracops;
pub mod grid;
pub mod laplace;
pub mod oscillator;
pub mod rheology;
pub mod verify;

pub use grid::{Grid, SampledFunction};
