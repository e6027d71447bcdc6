//! Site-probability extraction and caging classification.
//!
//! Detection mirrors the experiment: only sites with phonon number up to
//! `n_detect` are reported (cells `0..n_detect` in full plus the two spins of
//! `A_{n_detect}`); whatever sits higher on the Fock ladder is accumulated in
//! a single above-window bucket so each row still accounts for the full state.

use std::collections::{BTreeMap, BTreeSet};

use crate::dynamics::{Snapshot, Trajectory};
use crate::error::{Error, Result};
use crate::gauge::CagingPrediction;
use crate::lattice::{EncodingMap, SiteIndex, SiteKind, Spin};

/// Per-site probabilities of one snapshot, restricted to the detection window.
#[derive(Debug, Clone)]
pub struct SiteProbabilities {
    pub time_ms: f64,
    /// Probability per detected site; iteration follows the enumeration order
    /// `A_up0, A_dn0, B_up0, ...`.
    pub probs: BTreeMap<SiteIndex, f64>,
    /// Total probability on basis states above the detection window.
    pub above_window: f64,
}

impl SiteProbabilities {
    pub fn prob(&self, site: &SiteIndex) -> f64 {
        self.probs.get(site).copied().unwrap_or(0.0)
    }

    /// Window probability plus the above-window bucket.
    pub fn total(&self) -> f64 {
        self.probs.values().sum::<f64>() + self.above_window
    }
}

/// Caging sizes read off from a trajectory, together with the observed cage
/// region and the peak probability that escaped it.
#[derive(Debug, Clone)]
pub struct CagingReport {
    pub observed_s_right: Option<u32>,
    pub observed_s_left: Option<u32>,
    /// Sites whose peak probability exceeded the classification threshold.
    pub cage_sites: BTreeSet<SiteIndex>,
    /// Peak total probability outside the cage over the time window.
    pub max_leakage: f64,
}

impl CagingReport {
    pub fn observed_s(&self) -> Option<u32> {
        self.observed_s_right
            .zip(self.observed_s_left)
            .map(|(r, l)| r.max(l))
    }

    pub fn is_caged(&self) -> bool {
        self.observed_s_right.is_some() && self.observed_s_left.is_some()
    }
}

/// Project one snapshot onto the detection window.
pub fn site_probabilities(
    snapshot: Snapshot<'_>,
    encoding: &EncodingMap,
    n_detect: usize,
    time_ms: f64,
) -> Result<SiteProbabilities> {
    if snapshot.dim() != encoding.dim() {
        return Err(Error::DimensionMismatch {
            expected: encoding.dim(),
            got: snapshot.dim(),
        });
    }
    let mut probs = BTreeMap::new();
    for site in encoding.detection_window(n_detect) {
        let idx = encoding.basis_index(&site)?;
        probs.insert(site, snapshot.basis_probability(idx));
    }
    let window_total: f64 = probs.values().sum();
    let mut above = snapshot.total_weight() - window_total;
    if above < 0.0 && above > -1e-9 {
        above = 0.0;
    }
    Ok(SiteProbabilities {
        time_ms,
        probs,
        above_window: above,
    })
}

/// Project every snapshot of a trajectory onto the detection window.
pub fn trajectory_probabilities(
    traj: &Trajectory,
    encoding: &EncodingMap,
    n_detect: usize,
) -> Result<Vec<SiteProbabilities>> {
    traj.iter()
        .map(|(t, snap)| site_probabilities(snap, encoding, n_detect, t))
        .collect()
}

/// Cage region implied by predicted caging sizes around `initial_cell`:
/// A sites of cells `initial-s_l+1 ..= initial+s_r-1` and the B/C sites of the
/// bonds touching them (`initial-s_l ..= initial+s_r-1`).
pub fn predicted_cage_sites(
    prediction: &CagingPrediction,
    initial_cell: usize,
    n_detect: usize,
) -> Option<BTreeSet<SiteIndex>> {
    let (s_r, s_l) = (prediction.s_right? as usize, prediction.s_left? as usize);
    let mut sites = BTreeSet::new();
    let a_lo = initial_cell.saturating_sub(s_l - 1);
    let a_hi = (initial_cell + s_r - 1).min(n_detect);
    for cell in a_lo..=a_hi {
        for spin in [Spin::Up, Spin::Down] {
            sites.insert(SiteIndex::new(SiteKind::A, spin, cell));
        }
    }
    let bc_lo = initial_cell.saturating_sub(s_l);
    let bc_hi = (initial_cell + s_r - 1).min(n_detect.saturating_sub(1));
    for cell in bc_lo..=bc_hi {
        for kind in [SiteKind::B, SiteKind::C] {
            for spin in [Spin::Up, Spin::Down] {
                sites.insert(SiteIndex::new(kind, spin, cell));
            }
        }
    }
    Some(sites)
}

/// Classify the observed caging behavior of a probability table.
///
/// The rightward caging size is the smallest `s >= 1` such that the total
/// probability on the A sites of cell `initial_cell + s` never exceeds
/// `epsilon`; `None` (uncaged) when probability above `epsilon` reaches the
/// outermost detected A site. Leftward is symmetric. `max_leakage` is
/// measured against the cage predicted from `prediction` when one is
/// available, and against the observed cage region otherwise.
pub fn observed_caging(
    probs: &[SiteProbabilities],
    initial_cell: usize,
    epsilon: f64,
    n_detect: usize,
    prediction: Option<&CagingPrediction>,
) -> Result<CagingReport> {
    if !(epsilon > 0.0 && epsilon < 0.1) {
        return Err(Error::Config(format!(
            "caging threshold must lie in (0, 0.1), got {epsilon}"
        )));
    }
    if probs.is_empty() {
        return Err(Error::Config("empty probability table".into()));
    }
    if initial_cell > n_detect {
        return Err(Error::Config(format!(
            "initial cell {initial_cell} lies outside the detection window (n_detect = {n_detect})"
        )));
    }

    // Peak probability per site over the window.
    let mut peak: BTreeMap<SiteIndex, f64> = BTreeMap::new();
    for row in probs {
        for (site, &p) in &row.probs {
            let entry = peak.entry(*site).or_insert(0.0);
            *entry = entry.max(p);
        }
    }
    let a_cell_peak = |cell: usize| -> f64 {
        [Spin::Up, Spin::Down]
            .iter()
            .map(|&spin| {
                peak.get(&SiteIndex::new(SiteKind::A, spin, cell))
                    .copied()
                    .unwrap_or(0.0)
            })
            .sum()
    };

    let observed_s_right = (1..)
        .take_while(|s| initial_cell + s <= n_detect)
        .find(|&s| a_cell_peak(initial_cell + s) <= epsilon)
        .map(|s| s as u32);
    let observed_s_left = (1..=initial_cell)
        .find(|&s| a_cell_peak(initial_cell - s) <= epsilon)
        .map(|s| s as u32);

    // On a finite window, classification near the edge is only meaningful if
    // at least two cells are visible on that side.
    if observed_s_right.is_none() && n_detect - initial_cell < 2
        || observed_s_left.is_none() && initial_cell < 2
    {
        return Err(Error::WindowTooSmall { initial_cell });
    }

    let cage_sites: BTreeSet<SiteIndex> = peak
        .iter()
        .filter(|(_, &p)| p > epsilon)
        .map(|(site, _)| *site)
        .collect();

    let leakage_set = prediction
        .and_then(|p| predicted_cage_sites(p, initial_cell, n_detect))
        .unwrap_or_else(|| cage_sites.clone());
    let max_leakage = probs
        .iter()
        .map(|row| {
            row.probs
                .iter()
                .filter(|(site, _)| !leakage_set.contains(site))
                .map(|(_, &p)| p)
                .sum::<f64>()
                + row.above_window
        })
        .fold(0.0, f64::max);

    Ok(CagingReport {
        observed_s_right,
        observed_s_left,
        cage_sites,
        max_leakage,
    })
}
