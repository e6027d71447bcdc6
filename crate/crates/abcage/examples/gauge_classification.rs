//! Classify the four reference link sets: interference matrix, nilpotency
//! index, loop operator, and the Abelian test.
//!
//! ```bash
//! cargo run -p abcage --example gauge_classification
//! ```

use abcage::gauge::{is_abelian, nilpotency_index, Mat2};
use abcage::runner::Preset;

fn fmt_mat(m: &Mat2) -> String {
    let f = |i: usize, j: usize| {
        let z = m.at(i, j);
        format!("{:+.2}{:+.2}i", z.re, z.im)
    };
    format!("[[{}, {}], [{}, {}]]", f(0, 0), f(0, 1), f(1, 0), f(1, 1))
}

fn main() {
    println!("link-set classification (tolerance 1e-12):\n");
    for preset in [Preset::Fig2a, Preset::Fig2b, Preset::Fig3a, Preset::Fig4a] {
        let cfg = preset.config().gauge.to_gauge_config().unwrap();
        let interference = cfg.interference_matrix();
        let loop_op = cfg.loop_operator();
        println!("{}:", preset.name());
        println!("  I = (U2 U1 + U4 U3)/2 = {}", fmt_mat(&interference));
        match nilpotency_index(&interference, 1e-12) {
            Some(m) => println!("  index(I) = {m}  -> caging for every initial spinor"),
            None => println!("  I is non-nilpotent -> caging only for kernel spinors, if any"),
        }
        println!("  W = U3' U4' U2 U1   = {}", fmt_mat(&loop_op));
        println!(
            "  abelian (W prop. to identity): {}\n",
            is_abelian(&loop_op, 1e-12)
        );
    }
}
