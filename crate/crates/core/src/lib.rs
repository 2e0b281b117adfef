//! Series expansion workbench for non-autonomous polynomial ODEs
//! `ẋ = Σ_i C(n,i) u_i(t) x^i`, `x(0) = 0`.
//!
//! The solution is computed symbolically as a graded series `Z` of words in
//! the shuffle algebra ([`series`]), evaluated numerically through iterated
//! integrals ([`quadrature`]), bounded with increasing-tree counts
//! ([`combinatorics`]) and checked against a Chen-Fliess expansion and a
//! Runge-Kutta reference ([`rk4`]).

pub mod algebra;
pub mod combinatorics;
pub mod error;
pub mod problem;
pub mod quadrature;
pub mod report;
pub mod rk4;
pub mod series;

pub use error::{Error, Result};
