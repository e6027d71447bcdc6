//! Predict caging sizes from the spinor-kernel criterion: the wave packet
//! cannot pass the m-th A site to its right once I^m annihilates its spinor.
//!
//! ```bash
//! cargo run -p abcage --example caging_prediction
//! ```

use abcage::gauge::{predict_caging, Spinor};
use abcage::runner::Preset;
use abcage::Complex64 as C64;

fn main() {
    let inv = std::f64::consts::FRAC_1_SQRT_2;
    let cases: [(Preset, &str, Spinor); 5] = [
        (Preset::Fig2a, "A_up2", Spinor::new(C64::ONE, C64::ZERO)),
        (
            Preset::Fig3a,
            "(A_dn2 + i A_up2)/sqrt(2)",
            Spinor::new(C64::new(0.0, inv), C64::new(inv, 0.0)),
        ),
        (
            Preset::Fig3b,
            "(A_dn2 - i A_up2)/sqrt(2)",
            Spinor::new(C64::new(0.0, -inv), C64::new(inv, 0.0)),
        ),
        (Preset::Fig4a, "A_up2", Spinor::new(C64::ONE, C64::ZERO)),
        (Preset::Fig4b, "A_dn2", Spinor::new(C64::ZERO, C64::ONE)),
    ];

    println!("spinor-kernel caging predictions:\n");
    for (preset, label, chi) in cases {
        let cfg = preset.config().gauge.to_gauge_config().unwrap();
        let p = predict_caging(&cfg, &chi, 1e-9);
        let show = |s: Option<u32>| s.map_or("unbounded".to_string(), |v| v.to_string());
        println!("{} with initial state {label}:", preset.name());
        println!(
            "  s_right = {}, s_left = {}, s = {}",
            show(p.s_right),
            show(p.s_left),
            show(p.s),
        );
        match p.s {
            Some(s) => println!("  -> confined within {s} cell(s) of the starting A site\n"),
            None => println!("  -> spreads without bound in at least one direction\n"),
        }
    }
}
