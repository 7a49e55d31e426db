//! Joint OAM spectrum of down-converted pairs for an m = 6 pump at increasing
//! asymmetry: band weights `l_s + l_i = l_p` and the idler spectrum at `l_s = 3`.
//!
//! ```bash
//! cargo run --release --example spiral_spectrum
//! ```

use oamspdc::fieldgrid::Grid;
use oamspdc::oamspec::LRange;
use oamspdc::spdc::{conditional_spectrum, joint_spectrum, CrystalParams};
use oamspdc::vortex::{pump_at_crystal, PumpSpec};

fn main() -> oamspdc::Result<()> {
    let crystal = CrystalParams::default();
    let grid = Grid::new(512, 6.0 * crystal.max_waist())?;
    let range = LRange::new(-10, 12)?;

    for shift in [0.0, 0.75, 1.25] {
        let pump = pump_at_crystal(&PumpSpec::new(6, shift, 1.2e-3, crystal.lambda_p), crystal.w_p, &grid)?;
        let joint = joint_spectrum(&pump, range, range, &crystal)?;
        println!("x_o/w = {shift}");
        for (l_p, weight) in joint.band_weights().into_iter().filter(|(_, w)| *w >= 1e-3) {
            println!("  band l_s + l_i = {l_p}: {weight:.4}");
        }
        let cond = conditional_spectrum(&joint, 3)?;
        let lines: Vec<String> = cond.iter().filter(|(_, p)| *p >= 0.01).map(|(l, p)| format!("{l}:{p:.3}")).collect();
        println!("  idler given l_s = 3: {}", lines.join(" "));
    }
    Ok(())
}
