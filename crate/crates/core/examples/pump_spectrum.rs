//! OAM content of a Gaussian beam after a spiral phase plate whose singularity is
//! displaced from the beam axis.
//!
//! ```bash
//! cargo run --release --example pump_spectrum
//! ```

use oamspdc::fieldgrid::Grid;
use oamspdc::oamspec::{dominant_modes, power_spectrum, LRange};
use oamspdc::vortex::{synthesize_shifted_vortex, PumpSpec};

fn main() -> oamspdc::Result<()> {
    let w_g = 1.2e-3;
    let grid = Grid::new(512, 6.0 * w_g)?;
    let range = LRange::symmetric(12)?;

    for m in [2, 4, 6] {
        for shift in [0.0, 0.5] {
            let pump = synthesize_shifted_vortex(&PumpSpec::new(m, shift, w_g, 405e-9), &grid)?;
            let spectrum = power_spectrum(&pump, range)?;
            let lines: Vec<String> = spectrum
                .iter()
                .filter(|(_, p)| *p >= 0.005)
                .map(|(l, p)| format!("{l}:{p:.3}"))
                .collect();
            println!(
                "m={m} x_o/w={shift:<4} <l>={:.3}  90% set {:?}  [{}]",
                spectrum.mean(),
                dominant_modes(&spectrum, 0.9),
                lines.join(" ")
            );
        }
    }
    Ok(())
}
