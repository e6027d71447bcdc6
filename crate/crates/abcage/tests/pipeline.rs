//! Cross-module integration: kernel-criterion vs dynamics agreement, the full
//! readout chain on simulator snapshots, and the runner's file outputs.

use nalgebra::DVector;
use num_complex::Complex64 as C64;

use abcage::analysis::{observed_caging, trajectory_probabilities};
use abcage::dynamics::{evolve_unitary, Snapshot};
use abcage::gauge::predict_caging;
use abcage::lattice::{build_ideal_hamiltonian, EncodingMap, IonSpec, SiteIndex};
use abcage::measurement::{fit_populations, shelving_plan, synthesize_flop, SidebandModel};
use abcage::runner::{self, Preset, RunConfig};

fn spinor_of(cfg: &RunConfig) -> abcage::gauge::Spinor {
    let mut up = C64::ZERO;
    let mut down = C64::ZERO;
    for e in &cfg.initial_state {
        let site: SiteIndex = e.site.parse().unwrap();
        let amp = C64::new(e.amp[0], e.amp[1]);
        if site.to_string().contains("up") {
            up += amp;
        } else {
            down += amp;
        }
    }
    abcage::gauge::Spinor::new(up, down)
}

/// Ideal-mode (flat lattice) closed-system run of a preset.
fn run_ideal(preset: Preset) -> (Vec<abcage::analysis::SiteProbabilities>, EncodingMap) {
    let cfg = preset.config();
    let gc = cfg.gauge.to_gauge_config().unwrap();
    let ion = IonSpec::default();
    let enc = EncodingMap::for_ion(&ion);
    let h = build_ideal_hamiltonian(&gc, ion.n_max).unwrap();
    let mut psi0 = DVector::<C64>::zeros(enc.dim());
    for e in &cfg.initial_state {
        let site: SiteIndex = e.site.parse().unwrap();
        psi0[enc.basis_index(&site).unwrap()] = C64::new(e.amp[0], e.amp[1]);
    }
    let traj = evolve_unitary(&h, &psi0, &cfg.times.grid()).unwrap();
    (
        trajectory_probabilities(&traj, &enc, ion.n_detect).unwrap(),
        enc,
    )
}

/// The spinor-kernel prediction matches the observed dynamics exactly on
/// every caged preset in flat-lattice mode.
#[test]
fn kernel_prediction_agrees_with_ideal_dynamics() {
    for preset in [Preset::Fig2a, Preset::Fig3a, Preset::Fig3b, Preset::Fig4b] {
        let cfg = preset.config();
        let gc = cfg.gauge.to_gauge_config().unwrap();
        let prediction = predict_caging(&gc, &spinor_of(&cfg), 1e-9);
        let (probs, _) = run_ideal(preset);
        let report = observed_caging(&probs, 2, 1e-4, 7, Some(&prediction)).unwrap();
        assert_eq!(report.observed_s_right, prediction.s_right, "{preset}");
        assert_eq!(report.observed_s_left, prediction.s_left, "{preset}");
        // Caging is exact here: nothing escapes beyond roundoff.
        assert!(
            report.max_leakage < 1e-8,
            "{preset}: leakage {:.3e}",
            report.max_leakage
        );
    }
}

/// Shelve -> marginalize -> synthesize -> fit reproduces the snapshot's site
/// probabilities within 2e-2 (noiseless probe, gamma_n = 0).
#[test]
fn readout_chain_reproduces_snapshot_probabilities() {
    let cfg = Preset::Fig2a.config();
    let gc = cfg.gauge.to_gauge_config().unwrap();
    let ion = IonSpec::default();
    let enc = EncodingMap::for_ion(&ion);
    let h = build_ideal_hamiltonian(&gc, ion.n_max).unwrap();
    let mut psi0 = DVector::<C64>::zeros(enc.dim());
    psi0[enc.basis_index(&"A_up2".parse().unwrap()).unwrap()] = C64::ONE;
    let traj = evolve_unitary(&h, &psi0, &[0.5]).unwrap();
    let snap = traj.snapshot(0);

    let model = SidebandModel::default();
    let taus: Vec<f64> = (0..400).map(|k| k as f64 * 4.0 / 399.0).collect();
    for target in 1..=6u8 {
        let plan = shelving_plan(target).unwrap();
        // Ideal pi-swaps permute level populations; the bright level then
        // carries exactly the target's phonon marginal.
        let bright_marginal: Vec<f64> = (0..model.n_terms)
            .map(|n| {
                (1..=6u8)
                    .filter(|&l| plan.map_level(l) == plan.readout_bright_level)
                    .map(|l| snap.basis_probability(enc.index_of(l, n)))
                    .sum()
            })
            .collect();
        let signal = synthesize_flop(&bright_marginal, &model, &taus);
        let fit = fit_populations(&signal, &model).unwrap();
        for n in 0..model.n_terms {
            let direct = snap.basis_probability(enc.index_of(target, n));
            assert!(
                (fit.populations[n] - direct).abs() < 2e-2,
                "target {target}, n {n}: fit {:.4} vs direct {:.4}",
                fit.populations[n],
                direct
            );
        }
    }
}

/// Direct transcription of the reference readout example: recover the phonon
/// marginal of the t = 0.5 ms snapshot per level and compare bin by bin.
#[test]
fn snapshot_marginal_fit_matches_direct_marginal() {
    let (probs, _) = {
        let cfg = Preset::Fig2a.config();
        let gc = cfg.gauge.to_gauge_config().unwrap();
        let ion = IonSpec::default();
        let enc = EncodingMap::for_ion(&ion);
        let h = build_ideal_hamiltonian(&gc, ion.n_max).unwrap();
        let mut psi0 = DVector::<C64>::zeros(enc.dim());
        psi0[enc.basis_index(&"A_up2".parse().unwrap()).unwrap()] = C64::ONE;
        let traj = evolve_unitary(&h, &psi0, &[0.5]).unwrap();
        let model = SidebandModel::default();
        let taus: Vec<f64> = (0..400).map(|k| k as f64 * 4.0 / 399.0).collect();
        let Snapshot::Pure(psi) = traj.snapshot(0) else {
            unreachable!()
        };
        let marginals: Vec<Vec<f64>> = (1..=6u8)
            .map(|l| {
                (0..model.n_terms)
                    .map(|n| psi[enc.index_of(l, n)].norm_sqr())
                    .collect()
            })
            .collect();
        for marginal in &marginals {
            let signal = synthesize_flop(marginal, &model, &taus);
            let fit = fit_populations(&signal, &model).unwrap();
            for (got, want) in fit.populations.iter().zip(marginal) {
                assert!((got - want).abs() < 1e-2);
            }
        }
        (marginals, ())
    };
    // The six marginals cover the full detected population at this time.
    let total: f64 = probs.iter().flatten().sum();
    assert!(total > 0.98, "detected population {total:.3}");
}

#[test]
fn runner_writes_consistent_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = Preset::Fig2a.config();
    let out = runner::run(&cfg, dir.path(), true).unwrap();

    // Report contents for the reference caged scenario.
    let report = &out.report;
    assert_eq!(report.nilpotency_index, Some(2));
    assert!(!report.abelian);
    let obs = report.observed.as_ref().unwrap();
    assert_eq!(obs.s, Some(2));
    assert!(!obs.uncaged);
    assert!((report.off_resonant_estimate - 1.5625e-4).abs() / 1.5625e-4 < 0.05);

    // CSV: header plus one row per sample; rows sum to 1 within 1e-6.
    let csv = std::fs::read_to_string(&out.trajectory_path).unwrap();
    let mut lines = csv.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("time_ms,A_up0,A_dn0,B_up0,B_dn0,C_up0,C_dn0,A_up1"));
    assert!(header.ends_with("A_up7,A_dn7,above_window"));
    assert_eq!(header.split(',').count(), 46);
    let mut rows = 0;
    for line in lines {
        let fields: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
        assert_eq!(fields.len(), 46);
        let total: f64 = fields[1..].iter().sum();
        assert!((total - 1.0).abs() < 1e-6, "row sums to {total}");
        rows += 1;
    }
    assert_eq!(rows, 201);

    // Report JSON parses and carries the algebra section.
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out.report_path).unwrap()).unwrap();
    assert_eq!(json["nilpotency_index"], 2);
    assert_eq!(json["abelian"], false);
    assert_eq!(json["observed"]["s"], 2);

    // Heatmap is a plausible SVG.
    let svg = std::fs::read_to_string(out.heatmap_path.as_ref().unwrap()).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("<rect"));
}

#[test]
fn runner_is_deterministic() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let cfg = Preset::Fig3a.config();
    let a = runner::run(&cfg, dir_a.path(), false).unwrap();
    let b = runner::run(&cfg, dir_b.path(), false).unwrap();
    let csv_a = std::fs::read(&a.trajectory_path).unwrap();
    let csv_b = std::fs::read(&b.trajectory_path).unwrap();
    assert_eq!(csv_a, csv_b, "trajectory tables must be bit-identical");
    let rep_a = std::fs::read(&a.report_path).unwrap();
    let rep_b = std::fs::read(&b.report_path).unwrap();
    assert_eq!(rep_a, rep_b, "reports must be bit-identical");
}

#[test]
fn runner_classifies_fig2b_as_uncaged() {
    let dir = tempfile::tempdir().unwrap();
    let out = runner::run(&Preset::Fig2b.config(), dir.path(), false).unwrap();
    assert_eq!(out.report.nilpotency_index, None);
    let obs = out.report.observed.as_ref().unwrap();
    assert!(obs.uncaged);
    assert_eq!(obs.s, None);
}

#[test]
fn runner_fig5a_reports_caged_with_leakage() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = Preset::Fig5a.config();
    // Shorter window keeps this integration test quick; leakage is already
    // visible well before 1 ms.
    cfg.times.stop_ms = 0.4;
    cfg.times.samples = 81;
    let out = runner::run(&cfg, dir.path(), false).unwrap();
    assert!(out.report.lindblad);
    let drift = out.report.trace_drift.unwrap();
    assert!(drift < 1e-6, "trace drift {drift:.3e}");
    let obs = out.report.observed.as_ref().unwrap();
    assert!(!obs.uncaged, "fig5a keeps a recognizable cage");
    assert_eq!(obs.s, Some(2));
    assert!(obs.max_leakage > 0.0, "noise must leak a little");
    assert!(
        obs.max_leakage < 1e-3,
        "leakage stays slight: {:.3e}",
        obs.max_leakage
    );
}

#[test]
fn config_file_round_trip_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = Preset::Fig4b.config();
    cfg.times.stop_ms = 0.2;
    cfg.times.samples = 41;
    let path = dir.path().join("run.json");
    std::fs::write(&path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    let loaded = RunConfig::load(&path).unwrap();
    assert!(runner::validate(&loaded).is_empty());
    let out = runner::run(&loaded, dir.path(), false).unwrap();
    assert_eq!(out.report.observed.as_ref().unwrap().s, Some(1));
}

#[test]
fn invalid_config_is_rejected_with_named_field() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = Preset::Fig2a.config();
    cfg.gauge.u3[0][0] = [2.0, 0.0];
    let err = runner::run(&cfg, dir.path(), false).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("non-unitary link u3"), "{msg}");
}
