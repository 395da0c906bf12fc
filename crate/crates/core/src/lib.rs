//! Numerical laboratory for harmonic Bergman-Besov kernels on the unit ball of `R^n`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classifier;
pub mod error;
pub mod geometry;
pub mod growth;
pub mod integral_ops;
pub mod kernel;
pub mod quadrature;
pub mod radial_ops;
pub mod schur;
pub mod special;
pub mod zonal;

pub use error::{Error, Result};
