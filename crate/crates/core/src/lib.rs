//! Positive multi-bump solutions of the Schrodinger-Poisson system
//!
//!     -Delta u + (lambda a(x) + 1) u + phi_u u = f(u),   -Delta phi_u = u^2
//!
//! on a truncated box, where the nonnegative potential a(x) vanishes on a
//! finite union of disjoint wells. The crate provides the discretization, the
//! free-space Coulomb coupling, the Nehari-set minimizers for the limit and
//! Neumann auxiliary problems, a penalized solver with lambda-continuation
//! that produces bumps concentrated in any selected subset of wells, and an
//! experiment driver with a CLI.

pub mod coulomb;
pub mod error;
pub mod experiment;
pub mod functionals;
pub mod grid;
pub mod model;
pub mod nehari;
pub mod solver;
pub mod wells;

pub use error::{Error, Result};
