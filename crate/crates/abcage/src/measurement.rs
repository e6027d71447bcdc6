//! Readout chain emulation: electron shelving, blue-sideband flopping, and
//! phonon-population recovery.
//!
//! Fluorescence detection distinguishes only "bright" (S_1/2, levels 1-2)
//! from "dark" (D_5/2). A shelving plan is a short sequence of ideal carrier
//! pi-swaps that leaves exactly one chosen level's population in S_1/2; the
//! D_5/2 manifold contributes two auxiliary Zeeman levels (m_j = +/-5/2,
//! modeled abstractly as parking slots 7 and 8) that never carry lattice
//! population.
//!
//! A blue-sideband probe of duration tau on the bright level then flops at
//! the motional-dependent rates `Omega_{n+1,n} = eta Omega sqrt(n+1)`,
//! producing
//!
//! ```text
//! P_down(tau) = 1/2 (1 + sum_n |C_n|^2 e^{-gamma_n tau} cos(2 Omega_{n+1,n} tau))
//! ```
//!
//! from which the occupations |C_n|^2 are recovered by non-negative least
//! squares with the frequencies and decay constants held fixed.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

/// Abstract parking slots within D_5/2 (the m_j = -5/2 and +5/2 sublevels).
pub const PARK_LOW: u8 = 7;
pub const PARK_HIGH: u8 = 8;

/// Is this level in the fluorescing S_1/2 manifold?
pub fn is_bright(level: u8) -> bool {
    level == 1 || level == 2
}

/// An ordered list of ideal carrier pi-swaps isolating one level in S_1/2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShelvingPlan {
    /// The level whose population is measured, 1..=6.
    pub target: u8,
    /// Pulses as (S_1/2 level, D_5/2 level) pairs, applied in order.
    pub pulses: Vec<(u8, u8)>,
    /// The S_1/2 level carrying the target population after the plan.
    pub readout_bright_level: u8,
}

impl ShelvingPlan {
    /// Where the population initially at `level` ends up after the plan.
    pub fn map_level(&self, level: u8) -> u8 {
        let mut at = level;
        for &(s, d) in &self.pulses {
            if at == s {
                at = d;
            } else if at == d {
                at = s;
            }
        }
        at
    }
}

/// Build the shelving plan for one target level.
///
/// Plans for the ground levels park the other S_1/2 level; plans for the
/// metastable levels first empty S_1/2 (one population parked, one moved into
/// the slot the target vacates) and then swap the target down.
pub fn shelving_plan(target: u8) -> Result<ShelvingPlan> {
    let (pulses, bright) = match target {
        1 => (vec![(2, PARK_HIGH)], 1),
        2 => (vec![(1, PARK_LOW)], 2),
        3..=6 => (vec![(2, PARK_LOW), (2, target), (1, target)], 2),
        _ => {
            return Err(Error::Config(format!(
                "shelving target must be an encoded level 1..=6, got {target}"
            )))
        }
    };
    Ok(ShelvingPlan {
        target,
        pulses,
        readout_bright_level: bright,
    })
}

/// Blue-sideband probe model: base Rabi rate, Lamb-Dicke factor, per-n decay
/// constants, and the number of Fock bins resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct SidebandModel {
    /// Carrier-scale Rabi rate Omega in rad/ms.
    pub base_rabi: f64,
    pub eta: f64,
    /// Phenomenological decay constants gamma_n in 1/ms; missing entries are 0.
    pub gammas: Vec<f64>,
    pub n_terms: usize,
}

impl SidebandModel {
    pub fn new(base_rabi: f64, eta: f64, n_terms: usize) -> Self {
        SidebandModel {
            base_rabi,
            eta,
            gammas: vec![0.0; n_terms],
            n_terms,
        }
    }

    /// Sideband rate `Omega_{n+1,n} = eta Omega sqrt(n+1)`.
    pub fn sideband_rabi(&self, n: usize) -> f64 {
        self.eta * self.base_rabi * ((n + 1) as f64).sqrt()
    }

    pub fn gamma(&self, n: usize) -> f64 {
        self.gammas.get(n).copied().unwrap_or(0.0)
    }
}

impl Default for SidebandModel {
    /// Probe at the sideband budget of the lattice drive: eta Omega = J/hbar
    /// for J/h = 2.5 kHz, resolving 8 Fock bins.
    fn default() -> Self {
        SidebandModel::new(std::f64::consts::TAU * 25.0, 0.1, 8)
    }
}

/// A synthesized (or measured) flopping signal.
#[derive(Debug, Clone, PartialEq)]
pub struct FlopSignal {
    pub taus: Vec<f64>,
    pub p_down: Vec<f64>,
}

/// Synthesize the bright-state probability for given phonon occupations.
pub fn synthesize_flop(populations: &[f64], model: &SidebandModel, taus: &[f64]) -> FlopSignal {
    let p_down = taus
        .iter()
        .map(|&tau| {
            let osc: f64 = populations
                .iter()
                .take(model.n_terms)
                .enumerate()
                .map(|(n, &c)| {
                    c * (-model.gamma(n) * tau).exp() * (2.0 * model.sideband_rabi(n) * tau).cos()
                })
                .sum();
            0.5 * (1.0 + osc)
        })
        .collect();
    FlopSignal {
        taus: taus.to_vec(),
        p_down,
    }
}

/// Recovered phonon occupations and the RMS misfit of the refit signal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub populations: Vec<f64>,
    pub residual: f64,
}

/// Recover occupations from a flopping signal by non-negative least squares
/// over the fixed basis `e^{-gamma_n tau} cos(2 Omega_{n+1,n} tau)`.
pub fn fit_populations(signal: &FlopSignal, model: &SidebandModel) -> Result<FitResult> {
    let m = signal.taus.len();
    if m != signal.p_down.len() {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: signal.p_down.len(),
        });
    }
    if m < 4 * model.n_terms {
        return Err(Error::IllConditioned(format!(
            "{} samples cannot constrain {} bins (need at least {})",
            m,
            model.n_terms,
            4 * model.n_terms
        )));
    }
    let span = signal.taus.iter().copied().fold(f64::MIN, f64::max)
        - signal.taus.iter().copied().fold(f64::MAX, f64::min);
    for n in 1..model.n_terms {
        let gap = model.sideband_rabi(n) - model.sideband_rabi(n - 1);
        if span < std::f64::consts::TAU / gap {
            return Err(Error::IllConditioned(format!(
                "grid span {span:.3} ms cannot separate sidebands n = {} and {} (need {:.3} ms)",
                n,
                n - 1,
                std::f64::consts::TAU / gap
            )));
        }
    }

    let design = DMatrix::from_fn(m, model.n_terms, |k, n| {
        let tau = signal.taus[k];
        (-model.gamma(n) * tau).exp() * (2.0 * model.sideband_rabi(n) * tau).cos()
    });
    let target = DVector::from_iterator(m, signal.p_down.iter().map(|&p| 2.0 * p - 1.0));
    let populations = nnls(&design, &target)?;
    let refit = &design * &populations;
    let residual = ((refit - &target).norm_squared() / m as f64).sqrt() / 2.0;
    Ok(FitResult {
        populations: populations.iter().copied().collect(),
        residual,
    })
}

/// Lawson-Hanson active-set non-negative least squares.
fn nnls(a: &DMatrix<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
    let n = a.ncols();
    let mut passive = vec![false; n];
    let mut x = DVector::zeros(n);
    let tol = 1e-12 * a.amax().max(1.0) * y.amax().max(1.0);

    let solve_passive = |passive: &[bool]| -> Result<DVector<f64>> {
        let cols: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
        let sub = a.select_columns(cols.iter());
        let sol = sub
            .svd(true, true)
            .solve(y, 1e-12)
            .map_err(|e| Error::Numerical(format!("least-squares solve failed: {e}")))?;
        let mut full = DVector::zeros(n);
        for (k, &j) in cols.iter().enumerate() {
            full[j] = sol[k];
        }
        Ok(full)
    };

    for _ in 0..(4 * n.max(8)) {
        let w = a.transpose() * (y - a * &x);
        let candidate = (0..n)
            .filter(|&j| !passive[j] && w[j] > tol)
            .max_by(|&i, &j| w[i].partial_cmp(&w[j]).unwrap());
        let Some(j_new) = candidate else {
            return Ok(x);
        };
        passive[j_new] = true;

        loop {
            let trial = solve_passive(&passive)?;
            let negative: Vec<usize> = (0..n).filter(|&j| passive[j] && trial[j] <= 0.0).collect();
            if negative.is_empty() {
                x = trial;
                break;
            }
            // Step back to the feasibility boundary and drop pinned variables.
            let alpha = negative
                .iter()
                .map(|&j| x[j] / (x[j] - trial[j]))
                .fold(f64::INFINITY, f64::min);
            x = &x + (trial - &x) * alpha;
            for j in 0..n {
                if passive[j] && x[j].abs() <= 1e-14 {
                    passive[j] = false;
                    x[j] = 0.0;
                }
            }
        }
    }
    Ok(x)
}
