//! Fraunhofer intensity of a shifted vortex, rendered as coarse ASCII art, and the
//! check that the OAM spectrum survives the far-field transform.
//!
//! ```bash
//! cargo run --release --example far_field_image -- 4 0.5
//! ```

use oamspdc::fieldgrid::Grid;
use oamspdc::oamspec::{power_spectrum, LRange};
use oamspdc::vortex::{far_field, synthesize_shifted_vortex, PumpSpec};

fn main() -> oamspdc::Result<()> {
    let mut args = std::env::args().skip(1);
    let m: u32 = args.next().and_then(|s| s.parse().ok()).unwrap_or(4);
    let shift: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.5);

    let w = 1.2e-3;
    let grid = Grid::fourier_balanced(256, w)?;
    let near = synthesize_shifted_vortex(&PumpSpec::new(m, shift, w, 405e-9), &grid)?;
    let far = far_field(&near)?;

    let n = grid.n();
    let intensity = far.intensity();
    let peak = intensity.iter().cloned().fold(0.0, f64::max);
    let shades = [' ', '.', ':', '-', '=', '+', '*', '#', '%', '@'];
    // central quarter of the window, two samples per character vertically
    let (lo, hi) = (3 * n / 8, 5 * n / 8);
    for k in (lo..hi).step_by(2).rev() {
        let row: String = (lo..hi)
            .map(|j| {
                let v = intensity[k * n + j] / peak;
                shades[((v * 9.0).round() as usize).min(9)]
            })
            .collect();
        println!("{row}");
    }

    let range = LRange::symmetric(12)?;
    let a = power_spectrum(&near, range)?;
    let b = power_spectrum(&far, range)?;
    let dev = a.iter().zip(b.iter()).map(|((_, p), (_, q))| (p - q).abs()).fold(0.0, f64::max);
    println!("m={m} x_o/w={shift}: max |P_l(near) - P_l(far)| = {dev:.2e}");
    Ok(())
}
