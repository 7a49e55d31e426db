//! Two-qubit tomography of the `{|2⟩, |0⟩}` subspace for an m = 2 pump: the
//! reconstructed density matrix and the Bell-state fidelity versus asymmetry.
//!
//! ```bash
//! cargo run --release --example bell_tomography
//! ```

use oamspdc::fieldgrid::Grid;
use oamspdc::oamspec::LRange;
use oamspdc::spdc::CrystalParams;
use oamspdc::tomo::{fidelity_sweep, QubitBasis, BASIS_LABELS};
use oamspdc::vortex::PumpSpec;

fn main() -> oamspdc::Result<()> {
    let crystal = CrystalParams::default();
    let grid = Grid::new(512, 6.0 * crystal.max_waist())?;
    let range = LRange::new(-10, 12)?;
    let basis = QubitBasis::new(2)?;
    let pump = PumpSpec::new(2, 0.0, 1.2e-3, crystal.lambda_p);
    let shifts = [0.0, 0.25, 0.5];

    for (label, noise) in [("noiseless", None), ("Poisson, N = 1e5, seed 7", Some(7))] {
        println!("{label}");
        let points = fidelity_sweep(&pump, &shifts, &crystal, &grid, (range, range), &basis, 100_000, noise)?;
        for p in &points {
            println!("  x_o/w = {:<4}  F = {:.5}", p.ratio, p.fidelity);
        }
        if noise.is_none() {
            let last = &points[points.len() - 1];
            println!("  Re ρ at x_o/w = {}:", last.ratio);
            for (r, row) in last.rho.real_parts().iter().enumerate() {
                let cells: Vec<String> = row.iter().map(|v| format!("{v:7.4}")).collect();
                println!("    {:<6} {}", BASIS_LABELS[r], cells.join(" "));
            }
        }
    }
    Ok(())
}
