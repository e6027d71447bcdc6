//! Closed-system caging on the flat rhombic lattice: a nilpotent interference
//! matrix confines the walker, a non-nilpotent one lets it spread.
//!
//! ```bash
//! cargo run -p abcage --example ideal_caging
//! ```

use abcage::analysis::{observed_caging, trajectory_probabilities};
use abcage::dynamics::evolve_unitary;
use abcage::lattice::{build_ideal_hamiltonian, EncodingMap, IonSpec, SiteIndex, SiteKind, Spin};
use abcage::runner::Preset;
use abcage::Complex64 as C64;
use nalgebra::DVector;

fn bar(p: f64) -> String {
    let n = (p * 40.0).round() as usize;
    "#".repeat(n.max(if p > 1e-6 { 1 } else { 0 }))
}

fn main() {
    let ion = IonSpec::default();
    let enc = EncodingMap::for_ion(&ion);
    for preset in [Preset::Fig2a, Preset::Fig2b] {
        let cfg = preset.config();
        let gc = cfg.gauge.to_gauge_config().unwrap();
        let h = build_ideal_hamiltonian(&gc, ion.n_max).unwrap();
        let mut psi0 = DVector::<C64>::zeros(enc.dim());
        for e in &cfg.initial_state {
            let site: SiteIndex = e.site.parse().unwrap();
            psi0[enc.basis_index(&site).unwrap()] = C64::new(e.amp[0], e.amp[1]);
        }
        let times = cfg.times.grid();
        let traj = evolve_unitary(&h, &psi0, &times).unwrap();
        let probs = trajectory_probabilities(&traj, &enc, ion.n_detect).unwrap();

        println!(
            "=== {} (flat lattice, initial A_up2, 0..1 ms) ===",
            preset.name()
        );
        println!("per-cell A-site probability at t = 1 ms:");
        let last = probs.last().unwrap();
        for cell in 0..=ion.n_detect {
            let p: f64 = [Spin::Up, Spin::Down]
                .iter()
                .map(|&s| last.prob(&SiteIndex::new(SiteKind::A, s, cell)))
                .sum();
            println!("  A_{cell}: {p:8.5}  {}", bar(p));
        }
        match observed_caging(&probs, 2, 1e-4, ion.n_detect, None) {
            Ok(report) => {
                if report.is_caged() {
                    println!(
                        "verdict: caged, s_right = {:?}, s_left = {:?}\n",
                        report.observed_s_right, report.observed_s_left
                    );
                } else {
                    println!("verdict: uncaged (probability reaches the window edge)\n");
                }
            }
            Err(e) => println!("classification failed: {e}\n"),
        }
    }
}
