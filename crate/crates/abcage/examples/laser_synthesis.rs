//! Synthesize the laser drive realizing a link configuration: carrier and
//! red-sideband tone tables, the equivalence of the driven Hamiltonian with
//! the lattice form, and the off-resonant excitation budget.
//!
//! ```bash
//! cargo run -p abcage --example laser_synthesis
//! ```

use abcage::lattice::{
    build_ion_hamiltonian, ion_hamiltonian_lattice_form, link_to_laser,
    off_resonant_excitation_estimate, IonSpec,
};
use abcage::runner::Preset;
use std::f64::consts::TAU;

fn main() {
    let preset = Preset::Fig2a;
    let cfg = preset.config().gauge.to_gauge_config().unwrap();
    let ion = IonSpec::default();
    let params = link_to_laser(&cfg, &ion);

    println!(
        "laser tones for {} (J/h = {} kHz, eta = {}, trap 2 pi x 2 MHz):\n",
        preset.name(),
        cfg.hopping_j_khz,
        ion.eta
    );
    println!("  g  e   kind   Omega/2pi (kHz)   phase (rad)");
    for g in 1..=2u8 {
        for e in 3..=6u8 {
            let car = params.car(g, e);
            let rsb = params.rsb(g, e);
            if car.rabi > 0.0 {
                println!(
                    "  {g}  {e}   CAR    {:>10.3}       {:>8.4}",
                    car.rabi / TAU,
                    car.phase
                );
            }
            if rsb.rabi > 0.0 {
                println!(
                    "  {g}  {e}   RSB    {:>10.3}       {:>8.4}",
                    rsb.rabi / TAU,
                    rsb.phase
                );
            }
        }
    }

    let lattice_form = ion_hamiltonian_lattice_form(&cfg, &ion);
    let driven = build_ion_hamiltonian(&params, &ion);
    let diff = (&lattice_form - &driven)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    println!("\nmax |H_lattice - H_driven| = {diff:.3e}  (entrywise equivalence)");

    let estimate = off_resonant_excitation_estimate(&cfg, &ion);
    println!("worst-case off-resonant carrier excitation by an RSB tone: {estimate:.4e}");
    println!("(negligible against 1, so the resonant model is justified)");
}
