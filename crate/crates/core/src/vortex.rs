//! Pump synthesis: a Gaussian beam through a spiral phase plate whose optic axis
//! is displaced from the beam axis, and the far field of any sampled field.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fieldgrid::{Grid, LgParams, ScalarField};

/// Largest supported SPP winding number.
pub const MAX_WINDING: u32 = 12;

/// How the plate's phase singularity enters the field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VortexProfile {
    /// `((x - x_o) + i y)^m` core: an m-fold zero at the displaced singularity.
    /// Expands exactly into the pump modes `m, m-1, ..., 0`.
    #[default]
    DisplacedCore,
    /// Pure phase `exp(i m atan2(y, x - x_o))` with no amplitude zero.
    PurePhase,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpSpec {
    /// SPP winding number.
    pub m: u32,
    /// Singularity offset in units of `w`.
    pub shift_ratio: f64,
    /// Gaussian amplitude radius, `exp(-r²/w²)`.
    pub w: f64,
    pub lambda_p: f64,
    pub profile: VortexProfile,
}

impl PumpSpec {
    pub fn new(m: u32, shift_ratio: f64, w: f64, lambda_p: f64) -> Self {
        PumpSpec { m, shift_ratio, w, lambda_p, profile: VortexProfile::default() }
    }

    pub fn with_profile(mut self, profile: VortexProfile) -> Self {
        self.profile = profile;
        self
    }

    /// Singularity position on the x axis (m).
    pub fn offset(&self) -> f64 {
        self.shift_ratio * self.w
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.w > 0.0 && self.w.is_finite()) {
            return Err(Error::config(format!("pump radius must be positive, got {}", self.w)));
        }
        if !(self.lambda_p > 0.0 && self.lambda_p.is_finite()) {
            return Err(Error::config(format!("pump wavelength must be positive, got {}", self.lambda_p)));
        }
        if self.m > MAX_WINDING {
            return Err(Error::config(format!(
                "SPP winding number {} exceeds supported maximum {MAX_WINDING}",
                self.m
            )));
        }
        if !(self.shift_ratio >= 0.0 && self.shift_ratio.is_finite()) {
            return Err(Error::config(format!("shift ratio must be >= 0, got {}", self.shift_ratio)));
        }
        Ok(())
    }

    /// Field amplitude before normalization.
    pub fn unnormalized(&self, x: f64, y: f64) -> Complex64 {
        let u = x / self.w;
        let v = y / self.w;
        let envelope = (-(u * u + v * v)).exp();
        let s = self.shift_ratio;
        match self.profile {
            VortexProfile::DisplacedCore => Complex64::new(u - s, v).powu(self.m) * envelope,
            VortexProfile::PurePhase => {
                Complex64::from_polar(envelope, self.m as f64 * v.atan2(u - s))
            }
        }
    }
}

/// Unit-power pump field centered on the grid, singularity at `(shift_ratio * w, 0)`.
pub fn synthesize_shifted_vortex(spec: &PumpSpec, grid: &Grid) -> Result<ScalarField> {
    spec.validate()?;
    let core = match spec.profile {
        VortexProfile::DisplacedCore => spec.m as i32,
        VortexProfile::PurePhase => 0,
    };
    LgParams::new(core, 0, spec.w).check_resolved(grid)?;
    if spec.offset() >= grid.extent() {
        return Err(Error::config(format!(
            "phase singularity at x = {:.3e} m lies outside the grid (extent {:.3e} m)",
            spec.offset(),
            grid.extent()
        )));
    }
    ScalarField::from_fn(*grid, |x, y| spec.unnormalized(x, y)).normalized()
}

/// The pump at the crystal: same winding and normalized asymmetry, envelope radius `w_p`.
pub fn pump_at_crystal(spec: &PumpSpec, w_p: f64, grid: &Grid) -> Result<ScalarField> {
    if !(w_p > 0.0 && w_p.is_finite()) {
        return Err(Error::config(format!("pump waist at crystal must be positive, got {w_p}")));
    }
    let focused = PumpSpec { w: w_p, ..*spec };
    synthesize_shifted_vortex(&focused, grid)
}

/// Fraunhofer pattern of `field`, unit power, on the input grid.
///
/// Output coordinates are the back focal plane of a lens with `λf = n·spacing²`,
/// which maps the DFT frequency lattice back onto the input sample positions. Both
/// lattices are cell-centered, so zero spatial frequency sits exactly on the grid
/// center and the OAM decomposition axis is preserved.
pub fn far_field(field: &ScalarField) -> Result<ScalarField> {
    let grid = *field.grid();
    let n = grid.n();
    let c = 0.5 * (n as f64 - 1.0);
    let twiddle: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(1.0, 2.0 * PI * c * j as f64 / n as f64))
        .collect();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);

    let mut data: Vec<Complex64> = field.amp().to_vec();
    // rows
    data.par_chunks_mut(n).enumerate().for_each(|(k, row)| {
        for (j, a) in row.iter_mut().enumerate() {
            *a *= twiddle[j] * twiddle[k];
        }
        fft.process(row);
        for (j, a) in row.iter_mut().enumerate() {
            *a *= twiddle[j];
        }
    });
    // columns, via transpose
    let mut t = transpose(&data, n);
    t.par_chunks_mut(n).for_each(|col| {
        fft.process(col);
        for (k, a) in col.iter_mut().enumerate() {
            *a *= twiddle[k];
        }
    });
    let out = transpose(&t, n);
    ScalarField::new(grid, out)?.normalized()
}

fn transpose(data: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
    for k in 0..n {
        for j in 0..n {
            out[j * n + k] = data[k * n + j];
        }
    }
    out
}
