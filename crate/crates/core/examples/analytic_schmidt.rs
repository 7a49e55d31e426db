//! Gaussian-pump Schmidt number from the closed-form expression under each
//! convention for the length scale `b`, and its minimum at `w_p = 2αb`.
//!
//! ```bash
//! cargo run --example analytic_schmidt
//! ```

use oamspdc::spdc::{calibrate_b_convention, schmidt_formula, SchmidtParams, K_THEO_ANCHOR};

fn main() {
    let sp = SchmidtParams::default();
    let (selected, table) = calibrate_b_convention(&sp);
    for a in &table {
        println!("{:<28} b = {:.4e} m  K = {:.4}  |K - {K_THEO_ANCHOR}| = {:.4}", a.convention, a.b, a.k, (a.k - K_THEO_ANCHOR).abs());
    }
    println!("closest convention: {selected}");

    let b = table[0].b;
    println!("\nK versus pump waist (b = {b:.3e} m):");
    for f in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let w_p = f * 2.0 * sp.alpha * b;
        println!("  w_p = {f:>4} · 2αb  K = {:.4}", schmidt_formula(w_p, b, sp.alpha, sp.beta));
    }
}
