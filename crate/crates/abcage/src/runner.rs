//! Configuration-driven experiment runner.
//!
//! A [`RunConfig`] (JSON on disk, complex numbers as `[re, im]` pairs) fully
//! describes one run: links, ion parameters, initial state, time window,
//! optional noise, and integrator step. Named presets expand to the reference
//! scenarios of the caging study. Each run writes
//!
//! - `trajectory.csv` — one row per sample time, one probability column per
//!   detected site (enumeration order `A_up0, A_dn0, B_up0, ...`) plus an
//!   `above_window` bucket,
//! - `report.json` — link algebra (interference matrix, nilpotency index,
//!   loop operator, Abelian flag), predicted and observed caging, leakage,
//!   and the off-resonant excitation budget,
//! - optionally `heatmap.svg` — the probability-vs-time grid with site index
//!   vertical and time horizontal.

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::analysis::{observed_caging, trajectory_probabilities, CagingReport, SiteProbabilities};
use crate::dynamics::{
    evolve_lindblad, evolve_unitary, max_stable_step_ms, NoiseConfig, Trajectory, DEFAULT_STEP_MS,
};
use crate::error::{Error, Result};
use crate::gauge::{
    self, is_abelian, nilpotency_index, predict_caging, CagingPrediction, GaugeConfig, LatticeMode,
    Mat2, Spinor, ALGEBRA_TOL,
};
use crate::lattice::{
    build_ideal_hamiltonian, ion_hamiltonian_lattice_form, off_resonant_excitation_estimate,
    EncodingMap, IonSpec, SiteIndex, SiteKind,
};

/// Caging threshold for closed-system (unitary) runs.
pub const EPSILON_UNITARY: f64 = 1e-4;
/// Caging threshold for Lindblad runs, which tolerate slight leakage.
pub const EPSILON_LINDBLAD: f64 = 5e-2;

/// A 2x2 complex matrix as nested `[re, im]` pairs, row-major.
pub type LinkMatrix = [[[f64; 2]; 2]; 2];

pub fn mat2_to_array(m: &Mat2) -> LinkMatrix {
    [0, 1].map(|i| [0, 1].map(|j| [m.at(i, j).re, m.at(i, j).im]))
}

pub fn array_to_mat2(a: &LinkMatrix) -> Mat2 {
    Mat2(a.map(|row| row.map(|z| C64::new(z[0], z[1]))))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaugeSection {
    pub u1: LinkMatrix,
    pub u2: LinkMatrix,
    pub u3: LinkMatrix,
    pub u4: LinkMatrix,
    pub hopping_j_khz: f64,
    pub mode: LatticeMode,
}

impl GaugeSection {
    pub fn link(&self, which: &str) -> &LinkMatrix {
        match which {
            "u1" => &self.u1,
            "u2" => &self.u2,
            "u3" => &self.u3,
            "u4" => &self.u4,
            _ => unreachable!("link name"),
        }
    }

    pub fn to_gauge_config(&self) -> Result<GaugeConfig> {
        GaugeConfig::new(
            [
                array_to_mat2(&self.u1),
                array_to_mat2(&self.u2),
                array_to_mat2(&self.u3),
                array_to_mat2(&self.u4),
            ],
            self.hopping_j_khz,
            self.mode,
        )
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct IonSection {
    pub eta: f64,
    pub trap_freq_mhz: f64,
    pub n_max: usize,
    pub n_detect: usize,
}

impl Default for IonSection {
    fn default() -> Self {
        IonSection {
            eta: 0.1,
            trap_freq_mhz: 2.0,
            n_max: 15,
            n_detect: 7,
        }
    }
}

impl IonSection {
    pub fn to_ion_spec(&self) -> Result<IonSpec> {
        IonSpec::new(self.eta, self.trap_freq_mhz, self.n_max, self.n_detect)
    }
}

/// One initial-state term: a site label and a complex amplitude.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AmplitudeEntry {
    pub site: String,
    pub amp: [f64; 2],
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TimeWindow {
    pub start_ms: f64,
    pub stop_ms: f64,
    pub samples: usize,
}

impl Default for TimeWindow {
    fn default() -> Self {
        TimeWindow {
            start_ms: 0.0,
            stop_ms: 1.0,
            samples: 201,
        }
    }
}

impl TimeWindow {
    pub fn grid(&self) -> Vec<f64> {
        let n = self.samples.max(2);
        (0..n)
            .map(|k| self.start_ms + (self.stop_ms - self.start_ms) * k as f64 / (n - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputNames {
    pub trajectory: String,
    pub report: String,
    pub heatmap: String,
}

impl Default for OutputNames {
    fn default() -> Self {
        OutputNames {
            trajectory: "trajectory.csv".into(),
            report: "report.json".into(),
            heatmap: "heatmap.svg".into(),
        }
    }
}

fn default_step_ms() -> f64 {
    DEFAULT_STEP_MS
}

/// Full description of one run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub gauge: GaugeSection,
    #[serde(default)]
    pub ion: IonSection,
    pub initial_state: Vec<AmplitudeEntry>,
    #[serde(default)]
    pub times: TimeWindow,
    #[serde(default)]
    pub noise: Option<NoiseConfig>,
    #[serde(default = "default_step_ms")]
    pub step_ms: f64,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub outputs: OutputNames,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("config parse error: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn noise_active(&self) -> bool {
        self.noise.map(|n| !n.is_noiseless()).unwrap_or(false)
    }

    fn effective_epsilon(&self) -> f64 {
        self.epsilon.unwrap_or(if self.noise_active() {
            EPSILON_LINDBLAD
        } else {
            EPSILON_UNITARY
        })
    }
}

/// The eight reference scenarios, one per figure panel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig2a,
    Fig2b,
    Fig3a,
    Fig3b,
    Fig4a,
    Fig4b,
    Fig5a,
    Fig5b,
}

impl Preset {
    pub const ALL: [Preset; 8] = [
        Preset::Fig2a,
        Preset::Fig2b,
        Preset::Fig3a,
        Preset::Fig3b,
        Preset::Fig4a,
        Preset::Fig4b,
        Preset::Fig5a,
        Preset::Fig5b,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Fig2a => "fig2a",
            Preset::Fig2b => "fig2b",
            Preset::Fig3a => "fig3a",
            Preset::Fig3b => "fig3b",
            Preset::Fig4a => "fig4a",
            Preset::Fig4b => "fig4b",
            Preset::Fig5a => "fig5a",
            Preset::Fig5b => "fig5b",
        }
    }

    /// Initial cell for every preset (the wave packet starts on A sites of
    /// cell 2).
    pub fn initial_cell(&self) -> usize {
        2
    }

    pub fn config(&self) -> RunConfig {
        const ID: LinkMatrix = [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]];
        const SIGMA_X: LinkMatrix = [[[0.0, 0.0], [1.0, 0.0]], [[1.0, 0.0], [0.0, 0.0]]];
        const I_SIGMA_X: LinkMatrix = [[[0.0, 0.0], [0.0, 1.0]], [[0.0, 1.0], [0.0, 0.0]]];
        const ROT: LinkMatrix = [[[0.0, 0.0], [1.0, 0.0]], [[-1.0, 0.0], [0.0, 0.0]]];
        const SIGMA_Z: LinkMatrix = [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-1.0, 0.0]]];

        let amp_one = |site: &str| {
            vec![AmplitudeEntry {
                site: site.into(),
                amp: [1.0, 0.0],
            }]
        };
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        // (A_dn2 + sign * i A_up2) / sqrt(2)
        let superposition = |sign: f64| {
            vec![
                AmplitudeEntry {
                    site: "A_dn2".into(),
                    amp: [inv_sqrt2, 0.0],
                },
                AmplitudeEntry {
                    site: "A_up2".into(),
                    amp: [0.0, sign * inv_sqrt2],
                },
            ]
        };
        let noise = NoiseConfig {
            nbar_dot_per_s: 0.2,
            t2_motion_ms: 35.0,
            t2_spin_ms: 40.0,
        };

        let (links, initial, noise) = match self {
            Preset::Fig2a => ([ID, SIGMA_X, ROT, ID], amp_one("A_up2"), None),
            Preset::Fig2b => ([ID, I_SIGMA_X, ROT, ID], amp_one("A_up2"), None),
            Preset::Fig3a => ([ID, I_SIGMA_X, SIGMA_Z, ID], superposition(1.0), None),
            Preset::Fig3b => ([ID, I_SIGMA_X, SIGMA_Z, ID], superposition(-1.0), None),
            Preset::Fig4a => ([ID, ID, SIGMA_Z, ID], amp_one("A_up2"), None),
            Preset::Fig4b => ([ID, ID, SIGMA_Z, ID], amp_one("A_dn2"), None),
            Preset::Fig5a => ([ID, SIGMA_X, ROT, ID], amp_one("A_up2"), Some(noise)),
            Preset::Fig5b => ([ID, I_SIGMA_X, ROT, ID], amp_one("A_up2"), Some(noise)),
        };
        RunConfig {
            name: Some(self.name().into()),
            gauge: GaugeSection {
                u1: links[0],
                u2: links[1],
                u3: links[2],
                u4: links[3],
                hopping_j_khz: 2.5,
                mode: LatticeMode::Ion,
            },
            ion: IonSection::default(),
            initial_state: initial,
            times: TimeWindow::default(),
            noise,
            step_ms: DEFAULT_STEP_MS,
            epsilon: None,
            outputs: OutputNames::default(),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown preset {s:?}; expected one of fig2a, fig2b, fig3a, fig3b, fig4a, fig4b, fig5a, fig5b"
                ))
            })
    }
}

/// All configuration violations, as human-readable diagnostics naming the
/// offending field. An empty list means the config is runnable.
pub fn validate(cfg: &RunConfig) -> Vec<String> {
    let mut diags = Vec::new();
    for which in ["u1", "u2", "u3", "u4"] {
        let m = array_to_mat2(cfg.gauge.link(which));
        if !gauge::validate_unitary(&m, gauge::UNITARY_TOL) {
            diags.push(format!("non-unitary link {which}"));
        }
    }
    if !(cfg.gauge.hopping_j_khz > 0.0) {
        diags.push("hopping_j_khz must be positive".into());
    }
    if !(cfg.ion.eta > 0.0 && cfg.ion.eta < 1.0) {
        diags.push("eta must lie in (0, 1)".into());
    }
    if cfg.ion.n_detect > cfg.ion.n_max {
        diags.push("detection window exceeds simulation cutoff".into());
    }
    if cfg.times.samples < 2 {
        diags.push("times.samples must be at least 2".into());
    }
    if !(cfg.times.stop_ms > cfg.times.start_ms) || cfg.times.start_ms < 0.0 {
        diags.push("times must satisfy 0 <= start_ms < stop_ms".into());
    }
    if cfg.initial_state.is_empty() {
        diags.push("initial_state is empty".into());
    }
    let mut norm2 = 0.0;
    for entry in &cfg.initial_state {
        match entry.site.parse::<SiteIndex>() {
            Ok(site) => {
                if site.cell > cfg.ion.n_max {
                    diags.push(format!(
                        "initial site {} lies beyond the simulation cutoff",
                        entry.site
                    ));
                }
            }
            Err(_) => diags.push(format!("unparseable initial site label {:?}", entry.site)),
        }
        norm2 += entry.amp[0] * entry.amp[0] + entry.amp[1] * entry.amp[1];
    }
    if !cfg.initial_state.is_empty() && (norm2 - 1.0).abs() > 1e-9 {
        diags.push(format!(
            "initial state norm^2 = {norm2:.12} differs from 1 by more than 1e-9"
        ));
    }
    if !(cfg.step_ms > 0.0) {
        diags.push("step_ms must be positive".into());
    }
    if let Some(eps) = cfg.epsilon {
        if !(eps > 0.0 && eps < 0.1) {
            diags.push("epsilon must lie in (0, 0.1)".into());
        }
    }
    // Integrator stability only matters for Lindblad runs and needs the
    // Hamiltonian's magnitude, so check it last and only when buildable.
    if cfg.noise_active() && diags.is_empty() {
        if let (Ok(gc), Ok(ion)) = (cfg.gauge.to_gauge_config(), cfg.ion.to_ion_spec()) {
            let h = match cfg.gauge.mode {
                LatticeMode::Ideal => build_ideal_hamiltonian(&gc, ion.n_max).ok(),
                LatticeMode::Ion => Some(ion_hamiltonian_lattice_form(&gc, &ion)),
            };
            if let Some(h) = h {
                let bound = max_stable_step_ms(&h);
                if cfg.step_ms > bound {
                    diags.push(format!(
                        "step_ms = {} exceeds the stability bound {bound:.3e}",
                        cfg.step_ms
                    ));
                }
            }
        }
    }
    diags
}

/// Observed-caging section of the report.
#[derive(Debug, Clone, Serialize)]
pub struct ObservedSection {
    pub s_right: Option<u32>,
    pub s_left: Option<u32>,
    pub s: Option<u32>,
    pub uncaged: bool,
    pub max_leakage: f64,
    pub cage_sites: Vec<String>,
}

/// Analysis report written as `report.json`.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub name: Option<String>,
    pub mode: LatticeMode,
    pub hopping_j_khz: f64,
    pub interference_matrix: LinkMatrix,
    pub nilpotency_index: Option<u32>,
    pub loop_operator: LinkMatrix,
    pub abelian: bool,
    pub predicted: Option<CagingPrediction>,
    pub observed: Option<ObservedSection>,
    pub off_resonant_estimate: f64,
    pub epsilon: f64,
    pub lindblad: bool,
    /// |trace - 1| maximum over snapshots (Lindblad runs only).
    pub trace_drift: Option<f64>,
}

/// Everything a run produced.
#[derive(Debug)]
pub struct RunOutput {
    pub report: RunReport,
    pub probabilities: Vec<SiteProbabilities>,
    pub trajectory_path: PathBuf,
    pub report_path: PathBuf,
    pub heatmap_path: Option<PathBuf>,
}

/// If the initial state lives on the A sites of a single cell, return that
/// cell and its spinor for the kernel-criterion prediction.
fn initial_spinor(entries: &[AmplitudeEntry]) -> Option<(usize, Spinor)> {
    let mut cell = None;
    let mut up = C64::ZERO;
    let mut down = C64::ZERO;
    for e in entries {
        let site: SiteIndex = e.site.parse().ok()?;
        if site.kind != SiteKind::A {
            return None;
        }
        match cell {
            None => cell = Some(site.cell),
            Some(c) if c != site.cell => return None,
            _ => {}
        }
        let amp = C64::new(e.amp[0], e.amp[1]);
        match site.spin {
            crate::lattice::Spin::Up => up += amp,
            crate::lattice::Spin::Down => down += amp,
        }
    }
    Some((cell?, Spinor::new(up, down)))
}

/// Execute one run and write its artifacts into `out_dir`.
pub fn run(cfg: &RunConfig, out_dir: &Path, write_svg: bool) -> Result<RunOutput> {
    let diags = validate(cfg);
    if !diags.is_empty() {
        return Err(Error::Config(diags.join("; ")));
    }
    let gc = cfg.gauge.to_gauge_config()?;
    let ion = cfg.ion.to_ion_spec()?;
    let enc = EncodingMap::for_ion(&ion);

    let mut psi0 = DVector::<C64>::zeros(enc.dim());
    for entry in &cfg.initial_state {
        let site: SiteIndex = entry.site.parse()?;
        psi0[enc.basis_index(&site)?] += C64::new(entry.amp[0], entry.amp[1]);
    }

    let h = match cfg.gauge.mode {
        LatticeMode::Ideal => build_ideal_hamiltonian(&gc, ion.n_max)?,
        LatticeMode::Ion => ion_hamiltonian_lattice_form(&gc, &ion),
    };
    let times = cfg.times.grid();
    let lindblad = cfg.noise_active();
    let traj: Trajectory = if lindblad {
        let rho0 = &psi0 * psi0.adjoint();
        evolve_lindblad(&h, &rho0, &cfg.noise.unwrap(), &ion, &times, cfg.step_ms)?
    } else {
        evolve_unitary(&h, &psi0, &times)?
    };

    let probabilities = trajectory_probabilities(&traj, &enc, ion.n_detect)?;
    let trace_drift = lindblad.then(|| {
        traj.iter()
            .map(|(_, s)| (s.total_weight() - 1.0).abs())
            .fold(0.0, f64::max)
    });

    let interference = gc.interference_matrix();
    let loop_op = gc.loop_operator();
    let epsilon = cfg.effective_epsilon();
    let spinor = initial_spinor(&cfg.initial_state);
    let predicted: Option<CagingPrediction> =
        spinor.map(|(_, chi)| predict_caging(&gc, &chi, ALGEBRA_TOL));
    let observed = match spinor {
        Some((cell, _)) => {
            let report: CagingReport = observed_caging(
                &probabilities,
                cell,
                epsilon,
                ion.n_detect,
                predicted.as_ref(),
            )?;
            Some(ObservedSection {
                s_right: report.observed_s_right,
                s_left: report.observed_s_left,
                s: report.observed_s(),
                uncaged: !report.is_caged(),
                max_leakage: report.max_leakage,
                cage_sites: report.cage_sites.iter().map(|s| s.to_string()).collect(),
            })
        }
        None => None,
    };

    let report = RunReport {
        name: cfg.name.clone(),
        mode: cfg.gauge.mode,
        hopping_j_khz: cfg.gauge.hopping_j_khz,
        interference_matrix: mat2_to_array(&interference),
        nilpotency_index: nilpotency_index(&interference, ALGEBRA_TOL),
        loop_operator: mat2_to_array(&loop_op),
        abelian: is_abelian(&loop_op, ALGEBRA_TOL),
        predicted,
        observed,
        off_resonant_estimate: off_resonant_excitation_estimate(&gc, &ion),
        epsilon,
        lindblad,
        trace_drift,
    };

    std::fs::create_dir_all(out_dir)
        .map_err(|e| Error::Config(format!("cannot create {}: {e}", out_dir.display())))?;
    let trajectory_path = out_dir.join(&cfg.outputs.trajectory);
    write_trajectory_csv(&trajectory_path, &probabilities, &enc, ion.n_detect)?;
    let report_path = out_dir.join(&cfg.outputs.report);
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::Numerical(format!("report serialization failed: {e}")))?;
    std::fs::write(&report_path, json + "\n")
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", report_path.display())))?;
    let heatmap_path = if write_svg {
        let path = out_dir.join(&cfg.outputs.heatmap);
        write_heatmap_svg(&path, &probabilities, &enc, ion.n_detect)?;
        Some(path)
    } else {
        None
    };

    Ok(RunOutput {
        report,
        probabilities,
        trajectory_path,
        report_path,
        heatmap_path,
    })
}

fn write_trajectory_csv(
    path: &Path,
    probs: &[SiteProbabilities],
    enc: &EncodingMap,
    n_detect: usize,
) -> Result<()> {
    let window = enc.detection_window(n_detect);
    let mut out = Vec::new();
    let mut header = vec!["time_ms".to_string()];
    header.extend(window.iter().map(|s| s.to_string()));
    header.push("above_window".into());
    writeln!(out, "{}", header.join(",")).unwrap();
    for row in probs {
        let mut fields = vec![format!("{:.6}", row.time_ms)];
        fields.extend(window.iter().map(|s| format!("{:.12e}", row.prob(s))));
        fields.push(format!("{:.12e}", row.above_window));
        writeln!(out, "{}", fields.join(",")).unwrap();
    }
    std::fs::write(path, out)
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}

/// Five-stop viridis approximation.
fn colormap(t: f64) -> (u8, u8, u8) {
    const STOPS: [(f64, [f64; 3]); 5] = [
        (0.00, [68.0, 1.0, 84.0]),
        (0.25, [59.0, 82.0, 139.0]),
        (0.50, [33.0, 145.0, 140.0]),
        (0.75, [94.0, 201.0, 98.0]),
        (1.00, [253.0, 231.0, 37.0]),
    ];
    let t = t.clamp(0.0, 1.0);
    let mut rgb = STOPS[4].1;
    for w in STOPS.windows(2) {
        let (t0, c0) = w[0];
        let (t1, c1) = w[1];
        if t <= t1 {
            let f = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
            rgb = [0, 1, 2].map(|i| c0[i] + f * (c1[i] - c0[i]));
            break;
        }
    }
    (rgb[0] as u8, rgb[1] as u8, rgb[2] as u8)
}

fn write_heatmap_svg(
    path: &Path,
    probs: &[SiteProbabilities],
    enc: &EncodingMap,
    n_detect: usize,
) -> Result<()> {
    let window = enc.detection_window(n_detect);
    let n_sites = window.len();
    let n_times = probs.len();
    let (left, top, cell_w, cell_h) = (70.0, 20.0, 840.0 / n_times as f64, 560.0 / n_sites as f64);
    let plot_w = cell_w * n_times as f64;
    let plot_h = cell_h * n_sites as f64;
    let width = left + plot_w + 20.0;
    let height = top + plot_h + 50.0;

    let vmax = probs
        .iter()
        .flat_map(|row| row.probs.values().copied())
        .fold(0.0f64, f64::max)
        .max(1e-12);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\">\n"
    ));
    svg.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{width:.0}\" height=\"{height:.0}\" fill=\"white\"/>\n"
    ));
    for (k, row) in probs.iter().enumerate() {
        let x = left + k as f64 * cell_w;
        for (s, site) in window.iter().enumerate() {
            // Site index increases upward, matching the reference layout.
            let y = top + plot_h - (s + 1) as f64 * cell_h;
            let (r, g, b) = colormap(row.prob(site) / vmax);
            svg.push_str(&format!(
                "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"rgb({r},{g},{b})\"/>\n",
                cell_w + 0.5,
                cell_h + 0.5,
            ));
        }
    }
    // Site labels every six rows (one unit cell) plus the top A sites.
    for (s, site) in window.iter().enumerate() {
        if s % 6 == 0 || s + 2 == n_sites {
            let y = top + plot_h - (s as f64 + 0.5) * cell_h;
            svg.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{y:.1}\" font-size=\"10\" text-anchor=\"end\" dominant-baseline=\"middle\" font-family=\"monospace\">{site}</text>\n",
                left - 6.0
            ));
        }
    }
    // Time axis ticks.
    let t0 = probs.first().map(|r| r.time_ms).unwrap_or(0.0);
    let t1 = probs.last().map(|r| r.time_ms).unwrap_or(1.0);
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let x = left + f * plot_w;
        let t = t0 + f * (t1 - t0);
        svg.push_str(&format!(
            "<text x=\"{x:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"middle\" font-family=\"monospace\">{t:.2}</text>\n",
            top + plot_h + 16.0
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"middle\" font-family=\"monospace\">time (ms), color scale 0..{vmax:.3}</text>\n",
        left + plot_w / 2.0,
        top + plot_h + 36.0
    ));
    svg.push_str("</svg>\n");
    std::fs::write(path, svg)
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}

/// Sites outside the predicted cage, for leakage accounting in tests and
/// examples.
pub fn out_of_cage_sites(
    prediction: &CagingPrediction,
    initial_cell: usize,
    enc: &EncodingMap,
    n_detect: usize,
) -> Option<BTreeSet<SiteIndex>> {
    let cage = crate::analysis::predicted_cage_sites(prediction, initial_cell, n_detect)?;
    Some(
        enc.detection_window(n_detect)
            .into_iter()
            .filter(|s| !cage.contains(s))
            .collect(),
    )
}
