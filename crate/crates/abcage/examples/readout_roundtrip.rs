//! The qudit-phonon readout chain: electron-shelving plans for all six
//! levels, blue-sideband flopping synthesis, and population recovery by
//! non-negative least squares.
//!
//! ```bash
//! cargo run -p abcage --example readout_roundtrip
//! ```

use abcage::measurement::{fit_populations, shelving_plan, synthesize_flop, SidebandModel};

fn main() {
    println!("electron-shelving plans (S_1/2 = levels 1,2; parking = 7,8):\n");
    for target in 1..=6u8 {
        let plan = shelving_plan(target).unwrap();
        let pulses: Vec<String> = plan
            .pulses
            .iter()
            .map(|(s, d)| format!("pi({s}<->{d})"))
            .collect();
        println!(
            "  target {target}: {:<30} -> bright level {}",
            pulses.join(", "),
            plan.readout_bright_level
        );
    }

    // A thermal-looking phonon distribution to recover.
    let nbar = 1.2f64;
    let mut pops: Vec<f64> = (0..8i32)
        .map(|n| nbar.powi(n) / (nbar + 1.0).powi(n + 1))
        .collect();
    let total: f64 = pops.iter().sum();
    pops.iter_mut().for_each(|p| *p /= total);

    let model = SidebandModel::default();
    let taus: Vec<f64> = (0..400).map(|k| k as f64 * 4.0 / 399.0).collect();
    let signal = synthesize_flop(&pops, &model, &taus);
    println!(
        "\nsynthesized P_down over {} probe durations up to {} ms",
        taus.len(),
        taus.last().unwrap()
    );

    let fit = fit_populations(&signal, &model).unwrap();
    println!("fit residual (RMS): {:.2e}\n", fit.residual);
    println!("   n    true |C_n|^2    recovered");
    for (n, (want, got)) in pops.iter().zip(&fit.populations).enumerate() {
        println!("   {n}    {want:>10.6}    {got:>10.6}");
    }
}
