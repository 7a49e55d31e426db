//! Transverse-plane discretization, Laguerre–Gaussian modes and midpoint quadrature.
//!
//! Grids are square and cell-centered: sample `j` along an axis sits at
//! `x_j = (j - n/2 + 1/2) * spacing`, so no sample lands on the optical axis and
//! the grid is symmetric under 90° rotations about it. Every integral in the crate
//! is a midpoint Riemann sum with `spacing²` weights, accumulated in row-major order.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Square, uniform, axis-centered sampling of the transverse plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n: usize,
    extent: f64,
}

impl Grid {
    pub const MIN_SAMPLES: usize = 16;

    /// `n` samples per axis covering `[-extent, extent]` (meters).
    pub fn new(n: usize, extent: f64) -> Result<Self> {
        if n < Self::MIN_SAMPLES || !n.is_multiple_of(2) {
            return Err(Error::config(format!(
                "grid needs an even sample count >= {}, got {n}",
                Self::MIN_SAMPLES
            )));
        }
        if !(extent.is_finite() && extent > 0.0) {
            return Err(Error::config(format!("grid extent must be positive, got {extent}")));
        }
        Ok(Grid { n, extent })
    }

    /// Grid on which a Gaussian of radius `w` is equally well sampled in the near
    /// and in the far field (see [`crate::vortex::far_field`]).
    pub fn fourier_balanced(n: usize, w: f64) -> Result<Self> {
        let spacing = w * (PI / n as f64).sqrt();
        Grid::new(n, 0.5 * n as f64 * spacing)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Half-width in meters.
    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / self.n as f64
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of sample `j` along either axis.
    #[inline]
    pub fn coord(&self, j: usize) -> f64 {
        (j as f64 - 0.5 * self.n as f64 + 0.5) * self.spacing()
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.coord(j)).collect()
    }

    /// Same extent, `factor` times as many samples per axis.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Grid::new(self.n * factor, self.extent)
    }
}

/// Complex field sampled on a [`Grid`]; row `k` holds `y_k`, column `j` holds `x_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    amp: Vec<Complex64>,
}

impl ScalarField {
    pub fn new(grid: Grid, amp: Vec<Complex64>) -> Result<Self> {
        if amp.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} samples supplied for a {}x{} grid",
                amp.len(),
                grid.n(),
                grid.n()
            )));
        }
        if amp.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::Numerical("field contains non-finite samples".into()));
        }
        Ok(ScalarField { grid, amp })
    }

    /// Samples `f(x, y)` at every grid point.
    pub fn from_fn<F>(grid: Grid, f: F) -> Self
    where
        F: Fn(f64, f64) -> Complex64 + Sync,
    {
        let n = grid.n();
        let xs = grid.coords();
        let mut amp = vec![Complex64::new(0.0, 0.0); grid.len()];
        amp.par_chunks_mut(n).enumerate().for_each(|(k, row)| {
            let y = xs[k];
            for (j, a) in row.iter_mut().enumerate() {
                *a = f(xs[j], y);
            }
        });
        ScalarField { grid, amp }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn amp(&self) -> &[Complex64] {
        &self.amp
    }

    #[inline]
    pub fn at(&self, j: usize, k: usize) -> Complex64 {
        self.amp[k * self.grid.n() + j]
    }

    /// `∫|E|² d²r`.
    pub fn power(&self) -> f64 {
        let h = self.grid.spacing();
        self.amp.iter().map(|a| a.norm_sqr()).sum::<f64>() * h * h
    }

    /// Returns the field scaled to unit power.
    pub fn normalized(mut self) -> Result<Self> {
        let p = self.power();
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::Numerical(format!("cannot normalize a field of power {p}")));
        }
        let s = 1.0 / p.sqrt();
        self.amp.iter_mut().for_each(|a| *a *= s);
        Ok(self)
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.amp.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Laguerre–Gaussian mode parameters: azimuthal index `l`, radial index `p`, waist `w` (m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LgParams {
    pub l: i32,
    pub p: u32,
    pub w: f64,
}

impl LgParams {
    pub fn new(l: i32, p: u32, w: f64) -> Self {
        LgParams { l, p, w }
    }

    /// `|l| + 2p`.
    pub fn order(&self) -> u32 {
        self.l.unsigned_abs() + 2 * self.p
    }

    fn normalization(&self) -> f64 {
        let al = self.l.unsigned_abs();
        // p! / (p + |l|)!
        let ratio: f64 = (1..=al).map(|k| 1.0 / (self.p + k) as f64).product();
        (2.0 * ratio / PI).sqrt() / self.w
    }

    /// Mode amplitude at `(x, y)` in the waist plane.
    pub fn value(&self, x: f64, y: f64) -> Complex64 {
        let u = x / self.w;
        let v = y / self.w;
        let s = 2.0 * (u * u + v * v);
        let al = self.l.unsigned_abs();
        // (sqrt2 r / w)^|l| e^{i l θ} without going through atan2
        let z = Complex64::new(u, if self.l < 0 { -v } else { v }) * std::f64::consts::SQRT_2;
        let vortex = z.powu(al);
        vortex * (self.normalization() * laguerre(self.p, al as f64, s) * (-0.5 * s).exp())
    }

    /// Rejects grids too coarse or too small to hold the mode.
    ///
    /// Spacing must not exceed `w/8`. The extent must cover the radius where
    /// `2r²/w² = (sqrt(|l|+2p+1) + 4)²`, at least eight standard deviations past
    /// the mean of the mode's radial power distribution.
    pub fn check_resolved(&self, grid: &Grid) -> Result<()> {
        if !(self.w.is_finite() && self.w > 0.0) {
            return Err(Error::config(format!("LG waist must be positive, got {}", self.w)));
        }
        if grid.spacing() > self.w / 8.0 {
            return Err(Error::config(format!(
                "grid spacing {:.3e} m does not resolve LG(l={}, p={}) with waist {:.3e} m (need <= w/8)",
                grid.spacing(),
                self.l,
                self.p,
                self.w
            )));
        }
        let need = self.w * (((self.order() + 1) as f64).sqrt() + 4.0) / std::f64::consts::SQRT_2;
        if grid.extent() < need {
            return Err(Error::config(format!(
                "grid extent {:.3e} m too small for LG(l={}, p={}) with waist {:.3e} m (need >= {:.3e} m)",
                grid.extent(),
                self.l,
                self.p,
                self.w,
                need
            )));
        }
        Ok(())
    }
}

/// Generalized Laguerre polynomial `L_p^a(x)` by the three-term recurrence in `p`.
pub fn laguerre(p: u32, a: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if p == 0 {
        return prev;
    }
    let mut cur = 1.0 + a - x;
    for k in 1..p {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + a - x) * cur - (k + a) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Samples `LG_{l,p}` at its waist plane.
pub fn lg_mode(params: LgParams, grid: &Grid) -> Result<ScalarField> {
    params.check_resolved(grid)?;
    Ok(ScalarField::from_fn(*grid, |x, y| params.value(x, y)))
}

/// `∫ a*(r) b(r) d²r` in row-major order.
pub fn inner_product(a: &ScalarField, b: &ScalarField) -> Result<Complex64> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch(format!(
            "inner product of fields on {:?} and {:?}",
            a.grid(),
            b.grid()
        )));
    }
    let h = a.grid().spacing();
    let sum = a
        .amp()
        .iter()
        .zip(b.amp())
        .fold(Complex64::new(0.0, 0.0), |acc, (x, y)| acc + x.conj() * y);
    Ok(sum * (h * h))
}

/// Midpoint-rule integral of a pointwise function on `grid` refined `refinement` times.
///
/// Test oracle for discretization error; it never touches sampled fields.
pub fn oracle_integrate<F>(f: F, grid: &Grid, refinement: usize) -> Result<Complex64>
where
    F: Fn(f64, f64) -> Complex64 + Sync,
{
    if refinement < 2 {
        return Err(Error::config(format!("oracle refinement must be >= 2, got {refinement}")));
    }
    let fine = grid.refined(refinement)?;
    let xs = fine.coords();
    let h = fine.spacing();
    // per-row partial sums, combined in row order
    let rows: Vec<Complex64> = xs
        .par_iter()
        .map(|&y| xs.iter().fold(Complex64::new(0.0, 0.0), |acc, &x| acc + f(x, y)))
        .collect();
    let total = rows.iter().fold(Complex64::new(0.0, 0.0), |acc, r| acc + r);
    Ok(total * (h * h))
}
