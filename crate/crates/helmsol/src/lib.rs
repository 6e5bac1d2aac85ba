//! Numerical evaluation of fundamental solutions of a multidimensional
//! Helmholtz equation whose first-order coefficients are singular on three
//! coordinate hyperplanes, built on confluent quadrivariate hypergeometric
//! series.
//!
//! The crate is organized bottom-up:
//!
//! - [`series`]: scalar special-function kernels (gamma, digamma, Gauss 2F1
//!   over the full argument range, 0F1, a convergence-accelerated value at
//!   unit argument).
//! - [`quad`]: the quadrivariate series, its confluent limit, triple
//!   hypergeometric series, decompositions into Gauss products, an integral
//!   representation for deep arguments, and the eight branch solutions of
//!   the underlying hypergeometric system.
//! - [`fundsol`]: the coordinate map onto hypergeometric arguments,
//!   normalization constants, and the eight fundamental solutions q_1..q_8.
//! - [`verify`]: residual checks against the differential equation and its
//!   hypergeometric system, singularity-strength fits, and a randomized
//!   summation identity check.
//! - [`cli`]: the command-line front end.

pub mod cli;
pub mod error;
pub mod fundsol;
pub mod quad;
pub mod series;
mod sum;
pub mod verify;
