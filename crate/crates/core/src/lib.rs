//! Lie point symmetries of the heat equation `D_t^α u = Δu` in `n` spatial
//! dimensions, for the classical case `α = 1` and the Riemann–Liouville
//! fractional case with symbolic `α ∈ (0, 1)`.
//!
//! The crate is layered bottom-up:
//!
//! * [`expr`] is a small computer-algebra kernel over jet coordinates with
//!   coefficients in `Q[α]`.
//! * [`vector_fields`] holds generators, Lie brackets and structure checks.
//! * [`catalog`] lists the generators for every dimension and regime.
//! * [`prolong`] verifies integer generators against the determining
//!   equations and builds the finite transformations.
//! * [`numerics`] has the fractional-calculus kernels and grid checks.
//! * [`conservation`] constructs and verifies conserved vectors.

pub mod catalog;
pub mod conservation;
pub mod error;
pub mod expr;
pub mod numerics;
pub mod prolong;
pub mod vector_fields;

pub use error::{Error, Result};
