//! Numerical toolkit for Yang-Mills theory on a circle: matrix Lie group
//! kernel for U(1)/SU(2), heat kernels and heat-kernel coherent states on
//! the group and its complexification, Wiener/bridge measures on loop
//! groups with Cameron-Martin reweighting, discretized connections and
//! Wilson loops, Fock-space coherent-state algebra under the gauge
//! representation, and the Monte-Carlo reduced inner product identifying
//! the two sides.
//!
//! Layout follows the problem structure:
//!
//! - [`group`]: U(1)/SU(2) and their complexifications; exponential map,
//!   adjoint action, characters, Casimir eigenvalues, Haar sampling.
//! - [`heat`]: heat kernels by character sums, Hall-type coherent states,
//!   the phase-space measure, and L2(K) pairings.
//! - [`paths`]: flat Wiener increments, the Ito product map, pinned loop
//!   bridges, stochastic pairings, Cameron-Martin weights.
//! - [`gauge`]: lattice fields on the circle, the gauge action, Gauss law,
//!   and complete/incomplete/complexified Wilson loops.
//! - [`fock`]: exponential vectors, coherent combos, and the gauge-group
//!   representation on them.
//! - [`reduction`]: the Monte-Carlo reduced form, the reduction map onto
//!   heat-kernel coherent states, and the verification protocols.
//! - [`stats`]: seeded sharded Monte-Carlo estimation and small test
//!   statistics.

pub mod error;
pub mod fock;
pub mod gauge;
pub mod group;
pub mod heat;
pub mod paths;
pub mod reduction;
pub mod stats;

pub use error::{Error, Result};
pub use group::{AlgebraVector, ComplexAlgebraVector, ComplexGroupElement, GroupElement, GroupSpec, Rep};
