//! Numerical laboratory for linear eigenvalue statistics of real random
//! centrosymmetric matrices.
//!
//! The crate is organised bottom-up:
//!
//! * [`matrix`] is a small dense square-matrix type backed by a tuned GEMM.
//! * [`centro`] samples the ensemble and splits a matrix into its two
//!   orthogonally similar half-size blocks.
//! * [`eig`] computes spectra (balancing, Hessenberg reduction, Francis QR)
//!   and exact trace powers.
//! * [`oracle`] evaluates finite-`n` chain expectations for Gaussian entries
//!   by exhaustive enumeration.
//! * [`fluctuation`] runs the Monte Carlo experiments.
//! * [`variance`] computes the limiting variance in closed form and by
//!   contour quadrature.

pub mod centro;
pub mod csv;
pub mod eig;
mod error;
pub mod fluctuation;
pub mod matrix;
pub mod oracle;
pub mod poly;
pub mod seed;
pub mod sum;
pub mod variance;

pub use error::{Error, Result};
pub use num_complex::Complex64;
