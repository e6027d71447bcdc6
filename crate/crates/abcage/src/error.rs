//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong while building or running a simulation.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A link variable failed the unitarity check.
    #[error("non-unitary link {which}: max deviation {deviation:.3e} exceeds {tol:.3e}")]
    NonUnitaryLink {
        which: &'static str,
        deviation: f64,
        tol: f64,
    },

    /// A site lies outside the encoded lattice.
    #[error("site {site} is outside the lattice (phonon cutoff n_max = {n_max})")]
    OutOfLattice { site: String, n_max: usize },

    /// Operator/state dimensions disagree.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The requested integrator step resolves the fastest coupling too coarsely.
    #[error("integrator step {step_ms:.3e} ms exceeds stability bound {max_ms:.3e} ms")]
    StepTooLarge { step_ms: f64, max_ms: f64 },

    /// The detection window is too small to classify caging around the initial cell.
    #[error("detection window too small: initial cell {initial_cell} is within 2 cells of the edge and no caging was detected")]
    WindowTooSmall { initial_cell: usize },

    /// The probe-duration grid cannot separate adjacent sideband frequencies.
    #[error("ill-conditioned fit: {0}")]
    IllConditioned(String),

    /// Invalid configuration input.
    #[error("config error: {0}")]
    Config(String),

    /// A numerical routine failed to produce a usable result.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
