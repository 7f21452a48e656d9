//! Numerical engine for a family of non-rational supersymmetric extensions of
//! the harmonic oscillator.
//!
//! The crate builds the two equivalent second-order SUSY transformations of
//! the oscillator (one adding two levels below the ground state, one moving
//! the first excited level), composes their intertwiners into fourth-order
//! ladder operators, and analyses the Barut-Girardello coherent states of the
//! resulting polynomial Heisenberg algebra.
//!
//! Module map:
//!
//! * [`specfun`]: reciprocal gamma, Kummer and `1F4` series, Hermite functions
//!   of real order, modified Bessel `K` and the Meijer-G functions of the
//!   completeness measure.
//! * [`quadrature`]: adaptive Gauss-Kronrod, Simpson and Gauss-Legendre rules.
//! * [`jet`]: truncated Taylor arithmetic used for every differential operator.
//! * [`oscillator`]: eigenfunctions, the divergent `phi_m` family and seeds.
//! * [`susy`]: Wronskians, partner potentials, intertwiners, missing states.
//! * [`ladder`]: fourth-order ladder operators and their algebra.
//! * [`coherent`]: coherent states, overlaps, energies, densities, measure.
//! * [`phase_space`]: Wigner functions and photon-number statistics.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coherent;
pub mod error;
pub mod grid;
pub mod jet;
pub mod ladder;
pub mod oscillator;
pub mod phase_space;
pub mod quadrature;
pub mod specfun;
pub mod susy;

pub use error::{Error, Result};
pub use grid::{Grid, GridFunction};
pub use jet::{Jet, JetFn};
