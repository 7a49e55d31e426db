//! Bi-photon OAM amplitudes from a structured pump in the thin-crystal limit,
//! spiral and conditional spectra, and Schmidt numbers.
//!
//! The amplitude for detecting the signal in `LG_{l_s,0}(w_s)` and the idler in
//! `LG_{l_i,0}(w_i)` is the transverse overlap
//!
//! ```text
//! C(l_s, l_i) = ∫ E_p(r) conj(LG_{l_s,0}(r; w_s)) conj(LG_{l_i,0}(r; w_i)) d²r
//! ```
//!
//! so OAM conservation `l_s + l_i = l_p` holds for every pump harmonic and a pump
//! carrying several harmonics fills several anti-diagonal bands coherently.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fieldgrid::{lg_mode, Grid, LgParams, ScalarField};
use crate::oamspec::{LRange, OamSpectrum};
use crate::vortex::{pump_at_crystal, PumpSpec};

/// Bands lighter than this are left out of sweep tables.
pub const BAND_WEIGHT_FLOOR: f64 = 1e-3;

/// Schmidt number the Gaussian-pump formula is calibrated against.
pub const K_THEO_ANCHOR: f64 = 2.82;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrystalParams {
    /// Crystal length L (m).
    pub length: f64,
    pub lambda_p: f64,
    pub lambda_s: f64,
    pub lambda_i: f64,
    /// Pump waist at the crystal (m).
    pub w_p: f64,
    /// Signal collection waist (m).
    pub w_s: f64,
    /// Idler collection waist (m).
    pub w_i: f64,
}

impl Default for CrystalParams {
    /// 30 mm PPKTP, 405 nm → 810 nm + 810 nm, 60 µm waists.
    fn default() -> Self {
        CrystalParams {
            length: 30e-3,
            lambda_p: 405e-9,
            lambda_s: 810e-9,
            lambda_i: 810e-9,
            w_p: 60e-6,
            w_s: 60e-6,
            w_i: 60e-6,
        }
    }
}

impl CrystalParams {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("length", self.length),
            ("lambda_p", self.lambda_p),
            ("lambda_s", self.lambda_s),
            ("lambda_i", self.lambda_i),
            ("w_p", self.w_p),
            ("w_s", self.w_s),
            ("w_i", self.w_i),
        ];
        for (name, v) in named {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(format!("crystal {name} must be positive, got {v}")));
            }
        }
        let lhs = 1.0 / self.lambda_p;
        let rhs = 1.0 / self.lambda_s + 1.0 / self.lambda_i;
        if ((lhs - rhs) / lhs).abs() > 1e-9 {
            return Err(Error::config(format!(
                "energy conservation violated: 1/λp = {lhs:.6e}, 1/λs + 1/λi = {rhs:.6e}"
            )));
        }
        Ok(())
    }

    /// Pump wavenumber `2π/λ_p`.
    pub fn k_p(&self) -> f64 {
        2.0 * PI / self.lambda_p
    }

    /// `γ = w_p / w_i`.
    pub fn gamma(&self) -> f64 {
        self.w_p / self.w_i
    }

    pub fn max_waist(&self) -> f64 {
        self.w_p.max(self.w_s).max(self.w_i)
    }
}

/// Bi-photon amplitude matrix, rows `l_s`, columns `l_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSpectrum {
    pub ls: LRange,
    pub li: LRange,
    pub amps: Vec<Complex64>,
    /// `|C|²` normalized over the whole matrix.
    pub probs: Vec<f64>,
}

impl JointSpectrum {
    pub fn from_amplitudes(ls: LRange, li: LRange, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != ls.len() * li.len() {
            return Err(Error::Numerical(format!(
                "{} amplitudes for a {}x{} joint spectrum",
                amps.len(),
                ls.len(),
                li.len()
            )));
        }
        if amps.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::Numerical("non-finite joint amplitude".into()));
        }
        let total: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        let probs = if total > 0.0 {
            amps.iter().map(|a| a.norm_sqr() / total).collect()
        } else {
            vec![0.0; amps.len()]
        };
        Ok(JointSpectrum { ls, li, amps, probs })
    }

    pub fn rows(&self) -> usize {
        self.ls.len()
    }

    pub fn cols(&self) -> usize {
        self.li.len()
    }

    fn offset(&self, l_s: i32, l_i: i32) -> Result<usize> {
        Ok(self.ls.index(l_s)? * self.cols() + self.li.index(l_i)?)
    }

    pub fn amp(&self, l_s: i32, l_i: i32) -> Result<Complex64> {
        Ok(self.amps[self.offset(l_s, l_i)?])
    }

    pub fn prob(&self, l_s: i32, l_i: i32) -> Result<f64> {
        Ok(self.probs[self.offset(l_s, l_i)?])
    }

    /// `Σ|C|²` before normalization.
    pub fn total_weight(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Probability on the outermost rows and columns; large values flag truncation.
    pub fn edge_fraction(&self) -> f64 {
        let mut s = 0.0;
        for (r, l_s) in self.ls.iter().enumerate() {
            for (c, l_i) in self.li.iter().enumerate() {
                if l_s == self.ls.min || l_s == self.ls.max || l_i == self.li.min || l_i == self.li.max {
                    s += self.probs[r * self.cols() + c];
                }
            }
        }
        s
    }

    /// `(l_s, l_i, C)` for every cell with `l_s + l_i = l_p`.
    pub fn band(&self, l_p: i32) -> Vec<(i32, i32, Complex64)> {
        self.ls
            .iter()
            .filter_map(|l_s| {
                let l_i = l_p - l_s;
                self.amp(l_s, l_i).ok().map(|a| (l_s, l_i, a))
            })
            .collect()
    }

    /// Band indices `l_s + l_i` the matrix can hold.
    pub fn band_span(&self) -> std::ops::RangeInclusive<i32> {
        (self.ls.min + self.li.min)..=(self.ls.max + self.li.max)
    }

    /// Normalized probability of every band `l_s + l_i = l_p`.
    pub fn band_weights(&self) -> BTreeMap<i32, f64> {
        let mut out = BTreeMap::new();
        for (r, l_s) in self.ls.iter().enumerate() {
            for (c, l_i) in self.li.iter().enumerate() {
                *out.entry(l_s + l_i).or_insert(0.0) += self.probs[r * self.cols() + c];
            }
        }
        out
    }

    pub(crate) fn matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows(), self.cols(), |r, c| self.amps[r * self.cols() + c])
    }
}

/// Collection modes for one arm, keyed by `l`.
struct ModeBank {
    modes: BTreeMap<i32, ScalarField>,
}

impl ModeBank {
    fn build(range: LRange, w: f64, grid: &Grid) -> Result<Self> {
        let modes = range
            .iter()
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&l| lg_mode(LgParams::new(l, 0, w), grid).map(|m| (l, m)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(ModeBank { modes })
    }
}

fn overlap(pump: &[Complex64], signal: &[Complex64], idler: &[Complex64], h2: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for ((p, s), i) in pump.iter().zip(signal).zip(idler) {
        acc += p * (s * i).conj();
    }
    acc * h2
}

/// Single amplitude `C(l_s, l_i)`.
pub fn overlap_coefficient(
    pump: &ScalarField,
    l_s: i32,
    l_i: i32,
    crystal: &CrystalParams,
) -> Result<Complex64> {
    crystal.validate()?;
    let grid = pump.grid();
    let s = lg_mode(LgParams::new(l_s, 0, crystal.w_s), grid)?;
    let i = lg_mode(LgParams::new(l_i, 0, crystal.w_i), grid)?;
    let h = grid.spacing();
    Ok(overlap(pump.amp(), s.amp(), i.amp(), h * h))
}

/// Fills `C(l_s, l_i)` over `ls × li`.
pub fn joint_spectrum(
    pump: &ScalarField,
    ls: LRange,
    li: LRange,
    crystal: &CrystalParams,
) -> Result<JointSpectrum> {
    crystal.validate()?;
    let ls = LRange::new(ls.min, ls.max)?;
    let li = LRange::new(li.min, li.max)?;
    let grid = pump.grid();
    let signal = ModeBank::build(ls, crystal.w_s, grid)?;
    let idler_owned;
    let idler = if crystal.w_i == crystal.w_s && ls.min <= li.min && li.max <= ls.max {
        &signal
    } else {
        idler_owned = ModeBank::build(li, crystal.w_i, grid)?;
        &idler_owned
    };
    let h = grid.spacing();
    let cols = li.len();
    let mut amps = vec![Complex64::new(0.0, 0.0); ls.len() * cols];
    amps.par_chunks_mut(cols)
        .zip(ls.iter().collect::<Vec<_>>())
        .for_each(|(row, l_s)| {
            let s = signal.modes[&l_s].amp();
            for (a, l_i) in row.iter_mut().zip(li.iter()) {
                *a = overlap(pump.amp(), s, idler.modes[&l_i].amp(), h * h);
            }
        });
    JointSpectrum::from_amplitudes(ls, li, amps)
}

/// Idler spectrum conditioned on detecting the signal in `l_s_fixed`.
pub fn conditional_spectrum(joint: &JointSpectrum, l_s_fixed: i32) -> Result<OamSpectrum> {
    let r = joint.ls.index(l_s_fixed)?;
    let row = joint.probs[r * joint.cols()..(r + 1) * joint.cols()].to_vec();
    if row.iter().sum::<f64>() <= 0.0 {
        return Err(Error::EmptyConditional(l_s_fixed));
    }
    OamSpectrum::from_weights(joint.li, row, 1.0)
}

/// Normalized squared Schmidt coefficients `σ_i² / Σσ²`, descending.
pub fn schmidt_coefficients(joint: &JointSpectrum) -> Result<Vec<f64>> {
    if joint.total_weight() <= 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let mut sv: Vec<f64> = joint.matrix().singular_values().iter().map(|s| s * s).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let total: f64 = sv.iter().sum();
    Ok(sv.into_iter().map(|s| s / total).collect())
}

/// `K = 1 / Σ p_i²` from the singular values of the full amplitude matrix.
pub fn azimuthal_schmidt(joint: &JointSpectrum) -> Result<f64> {
    let p = schmidt_coefficients(joint)?;
    Ok(1.0 / p.iter().map(|x| x * x).sum::<f64>())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandSchmidt {
    pub l_p: i32,
    /// Share of the joint probability carried by the band.
    pub weight: f64,
    pub k: f64,
}

/// Schmidt number of the single anti-diagonal `l_s + l_i = l_p`.
///
/// A one-band matrix is a permuted diagonal, so its singular values are the entry
/// magnitudes and `K = (Σ|C|²)² / Σ|C|⁴`.
pub fn band_schmidt(joint: &JointSpectrum, l_p: i32) -> Result<BandSchmidt> {
    let cells = joint.band(l_p);
    let s2: f64 = cells.iter().map(|c| c.2.norm_sqr()).sum();
    if cells.is_empty() || s2 <= 0.0 {
        return Err(Error::EmptyBand(l_p));
    }
    let s4: f64 = cells.iter().map(|c| c.2.norm_sqr().powi(2)).sum();
    Ok(BandSchmidt { l_p, weight: s2 / joint.total_weight(), k: s2 * s2 / s4 })
}

/// How the length scale `b` of the Gaussian-pump formula follows from `(L, k_p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BConvention {
    /// `b = sqrt(L / k_p)`
    SqrtLOverKp,
    /// `b = sqrt(L / (2 k_p))`
    SqrtLOverTwoKp,
    /// `b = sqrt(L λ_p / 2π)`
    SqrtLLambdaOverTwoPi,
}

impl BConvention {
    pub const ALL: [BConvention; 3] = [
        BConvention::SqrtLOverKp,
        BConvention::SqrtLOverTwoKp,
        BConvention::SqrtLLambdaOverTwoPi,
    ];

    pub fn b(&self, crystal: &CrystalParams) -> f64 {
        let l = crystal.length;
        match self {
            BConvention::SqrtLOverKp => (l / crystal.k_p()).sqrt(),
            BConvention::SqrtLOverTwoKp => (l / (2.0 * crystal.k_p())).sqrt(),
            BConvention::SqrtLLambdaOverTwoPi => (l * crystal.lambda_p / (2.0 * PI)).sqrt(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BConvention::SqrtLOverKp => "sqrt-l-over-kp",
            BConvention::SqrtLOverTwoKp => "sqrt-l-over-two-kp",
            BConvention::SqrtLLambdaOverTwoPi => "sqrt-l-lambda-over-two-pi",
        }
    }
}

impl std::fmt::Display for BConvention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchmidtParams {
    pub alpha: f64,
    pub beta: f64,
    pub b_convention: BConvention,
}

impl Default for SchmidtParams {
    fn default() -> Self {
        SchmidtParams { alpha: 0.85, beta: 1.65, b_convention: BConvention::SqrtLOverKp }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticSchmidt {
    pub k: f64,
    pub b: f64,
    pub convention: BConvention,
}

/// `K = β ((w² + 4α²b²) / (4 w α b))²` with `w` a pump waist.
pub fn schmidt_formula(w_p: f64, b: f64, alpha: f64, beta: f64) -> f64 {
    let ratio = (w_p * w_p + 4.0 * alpha * alpha * b * b) / (4.0 * w_p * alpha * b);
    beta * ratio * ratio
}

/// Gaussian-pump Schmidt number for the crystal, `b` per `sp.b_convention`.
pub fn analytic_schmidt_gaussian(crystal: &CrystalParams, sp: &SchmidtParams) -> AnalyticSchmidt {
    let b = sp.b_convention.b(crystal);
    AnalyticSchmidt {
        k: schmidt_formula(crystal.w_p, b, sp.alpha, sp.beta),
        b,
        convention: sp.b_convention,
    }
}

/// Evaluates every convention at the default crystal and picks the one closest to
/// [`K_THEO_ANCHOR`], earliest in [`BConvention::ALL`] on ties.
pub fn calibrate_b_convention(sp: &SchmidtParams) -> (BConvention, Vec<AnalyticSchmidt>) {
    let crystal = CrystalParams::default();
    let table: Vec<AnalyticSchmidt> = BConvention::ALL
        .iter()
        .map(|&c| analytic_schmidt_gaussian(&crystal, &SchmidtParams { b_convention: c, ..*sp }))
        .collect();
    let best = table
        .iter()
        .min_by(|a, b| (a.k - K_THEO_ANCHOR).abs().total_cmp(&(b.k - K_THEO_ANCHOR).abs()))
        .map(|a| a.convention)
        .unwrap_or(sp.b_convention);
    (best, table)
}

/// One asymmetry point of a Schmidt sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub ratio: f64,
    /// SVD Schmidt number of the full amplitude matrix.
    pub k_total: f64,
    /// `Σ w_band K_band`.
    pub k_weighted: f64,
    /// `Σ K_band` over the listed bands.
    pub k_band_sum: f64,
    /// Bands with weight >= [`BAND_WEIGHT_FLOOR`], ascending `l_p`.
    pub bands: Vec<BandSchmidt>,
}

/// Band weights and Schmidt numbers of one joint spectrum.
pub fn band_table(joint: &JointSpectrum) -> Result<Vec<BandSchmidt>> {
    let mut bands = Vec::new();
    for l_p in joint.band_span() {
        match band_schmidt(joint, l_p) {
            Ok(b) if b.weight >= BAND_WEIGHT_FLOOR => bands.push(b),
            Ok(_) | Err(Error::EmptyBand(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(bands)
}

pub fn sweep_row(ratio: f64, joint: &JointSpectrum) -> Result<SweepRow> {
    let bands = band_table(joint)?;
    Ok(SweepRow {
        ratio,
        k_total: azimuthal_schmidt(joint)?,
        k_weighted: bands.iter().map(|b| b.weight * b.k).sum(),
        k_band_sum: bands.iter().map(|b| b.k).sum(),
        bands,
    })
}

/// Pump → joint spectrum → Schmidt numbers, for each shift ratio.
pub fn schmidt_sweep(
    base: &PumpSpec,
    shifts: &[f64],
    crystal: &CrystalParams,
    grid: &Grid,
    ls: LRange,
    li: LRange,
) -> Result<Vec<SweepRow>> {
    shifts
        .iter()
        .map(|&ratio| {
            if ratio.is_nan() || ratio < 0.0 {
                return Err(Error::config(format!("shift ratio must be >= 0, got {ratio}")));
            }
            let spec = PumpSpec { shift_ratio: ratio, ..*base };
            let pump = pump_at_crystal(&spec, crystal.w_p, grid)?;
            let joint = joint_spectrum(&pump, ls, li, crystal)?;
            sweep_row(ratio, &joint)
        })
        .collect()
}
