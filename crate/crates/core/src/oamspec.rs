//! Azimuthal-harmonic (OAM) decomposition of a sampled field about the grid center.
//!
//! The field is resampled onto `n/2 + 1` rings reaching the Cartesian extent, each
//! ring carrying `N_θ` equally spaced samples, through a cubic B-spline fitted to the
//! Cartesian samples. The azimuthal integral is a ring FFT and the radial integral
//! is the trapezoid rule in `r dr`.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fieldgrid::ScalarField;

/// Largest |l| any decomposition or joint spectrum may request.
pub const MAX_L: i32 = 12;

/// Spectra capturing less than this fraction of the grid power carry a warning.
pub const CAPTURE_WARN: f64 = 0.999;

/// Inclusive range of OAM indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LRange {
    pub min: i32,
    pub max: i32,
}

impl LRange {
    pub fn new(min: i32, max: i32) -> Result<Self> {
        if min > max {
            return Err(Error::config(format!("empty OAM range [{min}, {max}]")));
        }
        if min < -MAX_L || max > MAX_L {
            return Err(Error::config(format!(
                "OAM range [{min}, {max}] exceeds supported bound ±{MAX_L}"
            )));
        }
        Ok(LRange { min, max })
    }

    /// `[-bound, bound]`.
    pub fn symmetric(bound: i32) -> Result<Self> {
        LRange::new(-bound, bound)
    }

    pub fn len(&self) -> usize {
        (self.max - self.min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, l: i32) -> bool {
        (self.min..=self.max).contains(&l)
    }

    pub fn iter(&self) -> std::ops::RangeInclusive<i32> {
        self.min..=self.max
    }

    pub fn index(&self, l: i32) -> Result<usize> {
        if self.contains(l) {
            Ok((l - self.min) as usize)
        } else {
            Err(Error::OutOfRange { index: l, min: self.min, max: self.max })
        }
    }
}

/// Radial profiles `a_l(r)` for every `l` in a range.
#[derive(Debug, Clone, PartialEq)]
pub struct AzimuthalComponents {
    pub range: LRange,
    /// Ring radii, `r_0 = 0` up to the grid extent (m).
    pub radii: Vec<f64>,
    /// `profiles[l - range.min][k] = a_l(radii[k])`.
    pub profiles: Vec<Vec<Complex64>>,
    pub n_theta: usize,
}

impl AzimuthalComponents {
    pub fn get(&self, l: i32) -> Option<&[Complex64]> {
        self.range.index(l).ok().map(|i| self.profiles[i].as_slice())
    }

    /// `2π ∫ |a_l(r)|² r dr` by the trapezoid rule with Euler-Maclaurin end
    /// corrections at `r = 0`.
    ///
    /// The integrand is `r h(r)` with `h = |a_l|²` even in `r`, so the trapezoid
    /// error is set by its odd derivatives at the origin, `h(0)` and `3 h''(0)`.
    /// The outer end carries no field and is left uncorrected.
    pub fn ring_power(&self, l: i32) -> Option<f64> {
        let a = self.get(l)?;
        let m = self.radii.len();
        let dr = self.radii[1] - self.radii[0];
        let s: f64 = a
            .iter()
            .zip(&self.radii)
            .enumerate()
            .map(|(k, (v, r))| {
                let w = if k == 0 || k == m - 1 { 0.5 } else { 1.0 };
                w * v.norm_sqr() * r
            })
            .sum();
        let h0 = a[0].norm_sqr();
        let h2 = 2.0 * (a[1].norm_sqr() - h0) / (dr * dr);
        let corrected = s * dr + dr * dr / 12.0 * h0 - dr.powi(4) / 240.0 * h2;
        Some(2.0 * PI * corrected)
    }
}

/// Normalized OAM power spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct OamSpectrum {
    pub range: LRange,
    /// `weights[l - range.min] = P_l`, summing to one.
    pub weights: Vec<f64>,
    /// Power inside the range over total field power.
    pub captured_fraction: f64,
    pub warning: Option<String>,
    pub radial_profiles: Option<AzimuthalComponents>,
}

impl OamSpectrum {
    /// Builds a spectrum from raw non-negative weights, normalizing them.
    pub fn from_weights(range: LRange, raw: Vec<f64>, captured_fraction: f64) -> Result<Self> {
        if raw.len() != range.len() {
            return Err(Error::Numerical(format!(
                "{} weights for a range of {} modes",
                raw.len(),
                range.len()
            )));
        }
        if raw.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::Numerical("OAM weights must be finite and non-negative".into()));
        }
        let total: f64 = raw.iter().sum();
        if total <= 0.0 {
            return Err(Error::ZeroMatrix);
        }
        let warning = (captured_fraction < CAPTURE_WARN).then(|| {
            format!(
                "range [{}, {}] captures only {:.4} of the field power",
                range.min, range.max, captured_fraction
            )
        });
        Ok(OamSpectrum {
            range,
            weights: raw.iter().map(|w| w / total).collect(),
            captured_fraction,
            warning,
            radial_profiles: None,
        })
    }

    pub fn weight(&self, l: i32) -> f64 {
        self.range.index(l).map(|i| self.weights[i]).unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.range.iter().zip(self.weights.iter().copied())
    }

    /// `Σ l P_l`.
    pub fn mean(&self) -> f64 {
        self.iter().map(|(l, p)| l as f64 * p).sum()
    }

    pub fn argmax(&self) -> i32 {
        dominant_modes(self, f64::MIN_POSITIVE)[0]
    }
}

/// Azimuthal Fourier components of `field` for every `l` in `range`.
pub fn azimuthal_components(field: &ScalarField, range: LRange) -> Result<AzimuthalComponents> {
    LRange::new(range.min, range.max)?;
    let grid = field.grid();
    let n = grid.n();
    let n_r = n / 2;
    let bound = 8 * (range.max.unsigned_abs() + range.min.unsigned_abs() + 8) as usize;
    let n_theta = bound.max(64).next_power_of_two();
    let spline = BSpline2::fit(field.amp(), n);
    let h = grid.spacing();
    let c = 0.5 * n as f64 - 0.5;
    let dr = grid.extent() / n_r as f64;
    let radii: Vec<f64> = (0..=n_r).map(|k| k as f64 * dr).collect();
    let trig: Vec<(f64, f64)> = (0..n_theta)
        .map(|t| (2.0 * PI * t as f64 / n_theta as f64).sin_cos())
        .collect();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n_theta);

    // rings[k][q]: q-th DFT coefficient of ring k, divided by N_θ
    let rings: Vec<Vec<Complex64>> = radii
        .par_iter()
        .map(|&r| {
            let mut ring: Vec<Complex64> = trig
                .iter()
                .map(|&(s, co)| spline.eval(r * co / h + c, r * s / h + c))
                .collect();
            fft.process(&mut ring);
            let inv = 1.0 / n_theta as f64;
            ring.iter_mut().for_each(|a| *a *= inv);
            ring
        })
        .collect();

    let profiles = range
        .iter()
        .map(|l| {
            let q = l.rem_euclid(n_theta as i32) as usize;
            rings.iter().map(|ring| ring[q]).collect()
        })
        .collect();
    Ok(AzimuthalComponents { range, radii, profiles, n_theta })
}

/// OAM power spectrum of `field` over `range`.
pub fn power_spectrum(field: &ScalarField, range: LRange) -> Result<OamSpectrum> {
    let comps = azimuthal_components(field, range)?;
    let raw: Vec<f64> = range.iter().map(|l| comps.ring_power(l).unwrap_or(0.0)).collect();
    let captured = raw.iter().sum::<f64>() / field.power();
    let mut spec = OamSpectrum::from_weights(range, raw, captured)?;
    spec.radial_profiles = Some(comps);
    Ok(spec)
}

/// Fewest modes, taken by descending weight, whose cumulative weight reaches `mass`.
///
/// Equal weights order by smaller |l|, then smaller l.
pub fn dominant_modes(spec: &OamSpectrum, mass: f64) -> Vec<i32> {
    let mut order: Vec<(i32, f64)> = spec.iter().collect();
    order.sort_by(|a, b| {
        b.1.total_cmp(&a.1)
            .then(a.0.abs().cmp(&b.0.abs()))
            .then(a.0.cmp(&b.0))
    });
    let target = mass.min(1.0);
    let mut out = Vec::new();
    let mut cum = 0.0;
    for (l, p) in order {
        out.push(l);
        cum += p;
        if cum >= target - 1e-12 {
            break;
        }
    }
    out
}

/// Cubic B-spline interpolant of a square complex image, mirror boundary.
struct BSpline2 {
    n: usize,
    coef: Vec<Complex64>,
}

impl BSpline2 {
    const POLE: f64 = -0.267_949_192_431_122_7; // sqrt(3) - 2

    fn fit(samples: &[Complex64], n: usize) -> Self {
        let mut coef = samples.to_vec();
        coef.par_chunks_mut(n).for_each(prefilter);
        let mut t = vec![Complex64::new(0.0, 0.0); n * n];
        for k in 0..n {
            for j in 0..n {
                t[j * n + k] = coef[k * n + j];
            }
        }
        t.par_chunks_mut(n).for_each(prefilter);
        for k in 0..n {
            for j in 0..n {
                coef[k * n + j] = t[j * n + k];
            }
        }
        BSpline2 { n, coef }
    }

    #[inline]
    fn mirror(&self, i: i64) -> usize {
        let n = self.n as i64;
        let period = 2 * n - 2;
        let mut i = i.rem_euclid(period);
        if i >= n {
            i = period - i;
        }
        i as usize
    }

    /// Value at fractional sample coordinates (`u` along a row, `v` down the columns).
    fn eval(&self, u: f64, v: f64) -> Complex64 {
        let (iu, wu) = weights(u);
        let (iv, wv) = weights(v);
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, wb) in wv.iter().enumerate() {
            let row = self.mirror(iv + b as i64) * self.n;
            let mut racc = Complex64::new(0.0, 0.0);
            for (a, wa) in wu.iter().enumerate() {
                racc += self.coef[row + self.mirror(iu + a as i64)] * *wa;
            }
            acc += racc * *wb;
        }
        acc
    }
}

#[inline]
fn weights(x: f64) -> (i64, [f64; 4]) {
    let f = x.floor();
    let t = x - f;
    let t2 = t * t;
    let t3 = t2 * t;
    let w0 = (1.0 - t).powi(3) / 6.0;
    let w1 = (3.0 * t3 - 6.0 * t2 + 4.0) / 6.0;
    let w2 = (-3.0 * t3 + 3.0 * t2 + 3.0 * t + 1.0) / 6.0;
    let w3 = t3 / 6.0;
    (f as i64 - 1, [w0, w1, w2, w3])
}

/// In-place interpolating prefilter for the cubic B-spline (mirror-symmetric extension).
fn prefilter(c: &mut [Complex64]) {
    let z = BSpline2::POLE;
    let n = c.len();
    let gain = (1.0 - z) * (1.0 - 1.0 / z);
    c.iter_mut().for_each(|v| *v *= gain);
    let horizon = ((1e-16f64).ln() / z.abs().ln()).ceil() as usize;
    let mut zk = 1.0;
    let mut sum = Complex64::new(0.0, 0.0);
    for v in c.iter().take(horizon.min(n)) {
        sum += v * zk;
        zk *= z;
    }
    c[0] = sum;
    for k in 1..n {
        let prev = c[k - 1];
        c[k] += prev * z;
    }
    c[n - 1] = (c[n - 1] + c[n - 2] * z) * (z / (z * z - 1.0));
    for k in (0..n - 1).rev() {
        c[k] = (c[k + 1] - c[k]) * z;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldgrid::{lg_mode, Grid, LgParams};

    fn spectrum_of(pairs: &[(i32, f64)]) -> OamSpectrum {
        let lo = pairs.iter().map(|p| p.0).min().unwrap();
        let hi = pairs.iter().map(|p| p.0).max().unwrap();
        let range = LRange::new(lo, hi).unwrap();
        let mut raw = vec![0.0; range.len()];
        for &(l, p) in pairs {
            raw[range.index(l).unwrap()] = p;
        }
        OamSpectrum::from_weights(range, raw, 1.0).unwrap()
    }

    #[test]
    fn spline_reproduces_samples() {
        let n = 32;
        let data: Vec<Complex64> = (0..n * n)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let s = BSpline2::fit(&data, n);
        for &(j, k) in &[(0usize, 0usize), (5, 17), (31, 31), (12, 0)] {
            let v = s.eval(j as f64, k as f64);
            assert!((v - data[k * n + j]).norm() < 1e-9, "({j},{k})");
        }
    }

    #[test]
    fn range_validation() {
        assert!(LRange::new(3, 2).is_err());
        assert!(LRange::new(-13, 0).is_err());
        assert!(LRange::new(0, 13).is_err());
        let r = LRange::new(-2, 3).unwrap();
        assert_eq!(r.len(), 6);
        assert!(matches!(r.index(4), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn pure_lg_mode_is_single_harmonic() {
        let w = 60e-6;
        let g = Grid::new(256, 6.0 * w).unwrap();
        let e = lg_mode(LgParams::new(2, 0, w), &g).unwrap();
        let range = LRange::symmetric(6).unwrap();
        let comps = azimuthal_components(&e, range).unwrap();
        let a2 = comps.get(2).unwrap();
        let peak = a2.iter().map(|a| a.norm()).fold(0.0, f64::max);
        let params = LgParams::new(2, 0, w);
        for (k, &r) in comps.radii.iter().enumerate() {
            // on the +x axis θ = 0, so the mode value is the radial profile
            let expect = params.value(r, 0.0);
            assert!((a2[k] - expect).norm() < 1e-3 * peak, "ring {k}");
        }
        for l in range.iter().filter(|&l| l != 2) {
            let max = comps.get(l).unwrap().iter().map(|a| a.norm()).fold(0.0, f64::max);
            assert!(max < 1e-6 * peak, "l={l}: {max}");
        }
    }

    #[test]
    fn spectrum_sums_to_one_and_flags_truncation() {
        let w = 60e-6;
        let g = Grid::new(256, 6.0 * w).unwrap();
        let e = lg_mode(LgParams::new(3, 0, w), &g).unwrap();
        let spec = power_spectrum(&e, LRange::symmetric(4).unwrap()).unwrap();
        let total: f64 = spec.weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(spec.warning.is_none());
        let cut = power_spectrum(&e, LRange::new(-2, 2).unwrap()).unwrap();
        assert!(cut.captured_fraction < 1e-3);
        assert!(cut.warning.is_some());
    }

    #[test]
    fn dominant_modes_examples() {
        let pure = spectrum_of(&[(5, 0.0), (6, 1.0), (7, 0.0)]);
        assert_eq!(dominant_modes(&pure, 0.95), vec![6]);
        let two = spectrum_of(&[(1, 0.5), (2, 0.5)]);
        assert_eq!(dominant_modes(&two, 0.6), vec![1, 2]);
        assert_eq!(dominant_modes(&two, 0.5), vec![1]);
        // |l| ties break toward the negative index
        let sym = spectrum_of(&[(-1, 0.25), (0, 0.5), (1, 0.25)]);
        assert_eq!(dominant_modes(&sym, 0.7), vec![0, -1]);
        assert_eq!(dominant_modes(&sym, 1.0), vec![0, -1, 1]);
    }

    #[test]
    fn from_weights_rejects_garbage() {
        let r = LRange::new(0, 1).unwrap();
        assert!(OamSpectrum::from_weights(r, vec![0.0, 0.0], 1.0).is_err());
        assert!(OamSpectrum::from_weights(r, vec![-1.0, 2.0], 1.0).is_err());
        assert!(OamSpectrum::from_weights(r, vec![1.0], 1.0).is_err());
    }
}
