//! Schmidt number of the bi-photon OAM state versus pump asymmetry, with the
//! per-band numbers and the three ways of totalling them.
//!
//! ```bash
//! cargo run --release --example schmidt_sweep
//! ```

use oamspdc::fieldgrid::Grid;
use oamspdc::oamspec::LRange;
use oamspdc::spdc::{schmidt_sweep, CrystalParams};
use oamspdc::vortex::PumpSpec;

fn main() -> oamspdc::Result<()> {
    let crystal = CrystalParams::default();
    let grid = Grid::new(512, 6.0 * crystal.max_waist())?;
    let range = LRange::new(-10, 12)?;
    let shifts: Vec<f64> = (0..8).map(|k| 0.25 * k as f64).collect();
    let rows = schmidt_sweep(&PumpSpec::new(6, 0.0, 1.2e-3, crystal.lambda_p), &shifts, &crystal, &grid, range, range)?;

    println!("{:>6} {:>9} {:>9} {:>9}  bands (l_p:K)", "x_o/w", "K_svd", "Σ w·K", "Σ K");
    for r in &rows {
        let bands: Vec<String> = r.bands.iter().map(|b| format!("{}:{:.2}", b.l_p, b.k)).collect();
        println!(
            "{:>6.2} {:>9.3} {:>9.3} {:>9.3}  {}",
            r.ratio,
            r.k_total,
            r.k_weighted,
            r.k_band_sum,
            bands.join(" ")
        );
    }
    Ok(())
}
