//! Laguerre-Gaussian modes on the grid: orthonormality, and the azimuthal
//! decomposition of a superposition back into its parts.
//!
//! ```bash
//! cargo run --release --example oam_decomposition
//! ```

use num_complex::Complex64;
use oamspdc::fieldgrid::{inner_product, lg_mode, Grid, LgParams, ScalarField};
use oamspdc::oamspec::{azimuthal_components, power_spectrum, LRange};

fn main() -> oamspdc::Result<()> {
    let w = 1.0;
    let grid = Grid::new(256, 6.0 * w)?;

    println!("Gram matrix of LG_(l,0), l = -2..2:");
    let modes: Vec<ScalarField> = (-2..=2).map(|l| lg_mode(LgParams::new(l, 0, w), &grid)).collect::<Result<_, _>>()?;
    for a in &modes {
        let row: Vec<String> = modes
            .iter()
            .map(|b| inner_product(a, b).map(|z| format!("{:8.5}", z.norm())))
            .collect::<Result<_, _>>()?;
        println!("  {}", row.join(" "));
    }

    // 0.6 LG_1 + 0.8i LG_-3
    let l1 = LgParams::new(1, 0, w);
    let l3 = LgParams::new(-3, 0, w);
    let field = ScalarField::from_fn(grid, |x, y| l1.value(x, y) * 0.6 + l3.value(x, y) * Complex64::new(0.0, 0.8));
    let range = LRange::symmetric(6)?;
    let spectrum = power_spectrum(&field, range)?;
    println!("superposition spectrum, captured {:.6}:", spectrum.captured_fraction);
    for (l, p) in spectrum.iter().filter(|(_, p)| *p > 1e-9) {
        println!("  l={l:>2}  P={p:.6}");
    }
    let comps = azimuthal_components(&field, range)?;
    println!("ring-resolved power of l=-3: {:.6}", comps.ring_power(-3).unwrap_or(0.0));
    Ok(())
}
