//! Numerical laboratory for homogenized surface tensions of stationary
//! random multi-phase interface energies.
//!
//! The library discretizes interface energies on the integer lattice and
//! estimates the effective (homogenized) surface tension per direction by
//! solving constrained minimization problems on oriented cubes of growing
//! side length. It is organized as:
//!
//! * [`geometry`] — oriented cubes, hyperplanes, pure-jump boundary data and
//!   rational-direction machinery,
//! * [`media`] — stationary random weight fields with exact integer-shift
//!   stationarity,
//! * [`lattice`] — label fields, stencils and the discrete interface energy,
//! * [`solver`] — exhaustive, min-cut and expansion-move minimizers,
//! * [`cell`] — cell-problem estimators, Monte-Carlo drivers and audits.

pub mod cell;
pub mod error;
pub mod geometry;
pub mod hash;
pub mod lattice;
pub mod media;
pub mod solver;
pub mod stats;
pub mod sum;

pub use error::{Error, Result};
