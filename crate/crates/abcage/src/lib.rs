//! Simulation and analysis of the non-Abelian Aharonov-Bohm caging effect on a
//! one-dimensional rhombic lattice with U(2) link variables, together with its
//! single-trapped-ion realization.
//!
//! The crate is organized around the stages of a caging experiment:
//!
//! - [`gauge`] — algebra of the U(2) links: interference matrix, nilpotency
//!   index, loop operator, Abelian classification, and spinor-kernel caging
//!   prediction.
//! - [`lattice`] — encoding between lattice sites and the ion's internal ⊗
//!   Fock states, the flat-lattice Hamiltonian, the laser-driven ion
//!   Hamiltonian with its link-to-laser parameter map, and the off-resonant
//!   excitation budget.
//! - [`dynamics`] — closed-system propagation by exact exponentiation and
//!   open-system Lindblad propagation with heating, cooling, motional
//!   dephasing, and spin dephasing.
//! - [`analysis`] — per-site probability extraction and observed caging-size
//!   classification.
//! - [`measurement`] — electron-shelving pulse plans, blue-sideband flopping
//!   signal synthesis, and least-squares phonon population recovery.
//! - [`runner`] — configuration-driven experiment runner with named presets
//!   for the reference scenarios, CSV/JSON/SVG export, and validation.
//!
//! Every capability has a runnable demonstration under `examples/`; the
//! `abcage` binary exposes the runner on the command line.

// Validation uses `!(x > 0.0)` so that NaN inputs fail closed.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod gauge;
pub mod lattice;
pub mod measurement;
pub mod runner;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use num_complex::Complex64;
