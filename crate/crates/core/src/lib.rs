//! Semiclassical trace and eigenvalue-counting asymptotics for the Dirichlet
//! magnetic Laplacian on planar domains.

// NaN-rejecting guards are written as `!(x > 0.0)`; index loops mirror the
// textbook forms of the banded and tridiagonal factorizations.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod asymptotics;
pub mod cli;
pub mod coeff;
pub mod config;
pub mod error;
pub mod geometry;
pub mod quadrature;
pub mod report;
pub mod special1d;
pub mod spectral2d;
pub mod tridiag;

pub use error::{Error, Result};
