//! Partial-skew-orthogonal polynomials and the Pfaffian calculus around them.
//!
//! The crate is organised in layers:
//!
//! * [`scalar`], [`jet`], [`poly`] — exact rational / float scalars, truncated
//!   jet arithmetic for derivatives at the origin, and dense polynomials,
//!   all behind small `Ring`/`Field` traits.
//! * [`pfaffian`] — evaluation of Pfaffians over plain skew matrices and over
//!   extended index lists (character rows `d0`, `d1`, `c0` and the polynomial
//!   row `z`), via memoised Laplace expansion.
//! * [`identities`] — residual validators for the classical Pfaffian
//!   identities (bilinear, Schur, bordered determinant factorisations,
//!   derivative and addition formulae).
//! * [`measures`] — discrete and quadrature-backed moment systems for the
//!   skew kernels and weight deformations used by the lattice hierarchy,
//!   with brute-force multiple-integral oracles.
//! * [`psop`] — partial-skew-orthogonal polynomial families, the four-term
//!   recurrence and truncated Lax matrices.
//! * [`lattices`] — tau tables, bilinear/nonlinear residuals and time
//!   evolution for the Toda/Lotka-Volterra lattices of BKP type.
//! * [`vpade`] — generalised inverse vector Pade approximants.
//! * [`accel`] — the Pfaffian convergence-acceleration lattice.

pub mod accel;
pub mod config;
pub mod error;
pub mod identities;
pub mod jet;
pub mod lattices;
pub mod measures;
pub mod pfaffian;
pub mod poly;
pub mod psop;
pub mod quadrature;
pub mod rng;
pub mod scalar;
pub mod vpade;

pub use error::{Error, Result};
pub use scalar::{Field, Rat, Ring};
