//! Experiment configuration: one TOML file, one section per physical group plus
//! one per experiment. Unknown keys are rejected. All lengths are in meters.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::fieldgrid::{Grid, LgParams};
use crate::oamspec::LRange;
use crate::spdc::{BConvention, CrystalParams, SchmidtParams};
use crate::vortex::{PumpSpec, VortexProfile, MAX_WINDING};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub pump: PumpConfig,
    pub crystal: CrystalConfig,
    pub numerics: NumericsConfig,
    pub spiral: SpiralConfig,
    pub schmidt: SchmidtConfig,
    pub tomo: TomoConfig,
    pub output: OutputConfig,
}

/// The beam incident on the spiral phase plate, used by `pump-spectrum`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PumpConfig {
    /// SPP winding numbers.
    pub orders: Vec<u32>,
    /// Singularity offsets `x_o / w_G`.
    pub shifts: Vec<f64>,
    /// Gaussian radius at the plate.
    pub w_g: f64,
    pub lambda_p: f64,
    pub profile: VortexProfile,
}

impl Default for PumpConfig {
    fn default() -> Self {
        PumpConfig {
            orders: vec![2, 4, 6],
            shifts: vec![0.0, 0.5],
            w_g: 1.2e-3,
            lambda_p: 405e-9,
            profile: VortexProfile::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CrystalConfig {
    pub length: f64,
    pub w_p: f64,
    pub w_s: f64,
    pub w_i: f64,
    pub lambda_s: f64,
    pub lambda_i: f64,
}

impl Default for CrystalConfig {
    fn default() -> Self {
        let c = CrystalParams::default();
        CrystalConfig {
            length: c.length,
            w_p: c.w_p,
            w_s: c.w_s,
            w_i: c.w_i,
            lambda_s: c.lambda_s,
            lambda_i: c.lambda_i,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsConfig {
    /// Samples per axis.
    pub grid_n: usize,
    /// Grid half-width in units of the widest beam radius in play.
    pub extent_factor: f64,
    /// OAM range of pump spectra.
    pub spectrum_l: [i32; 2],
    pub signal_l: [i32; 2],
    pub idler_l: [i32; 2],
}

impl Default for NumericsConfig {
    fn default() -> Self {
        NumericsConfig {
            grid_n: 512,
            extent_factor: 6.0,
            spectrum_l: [-12, 12],
            signal_l: [-10, 12],
            idler_l: [-10, 12],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpiralConfig {
    pub order: u32,
    pub shifts: Vec<f64>,
    /// Signal mode for the conditional idler spectrum.
    pub fixed_ls: i32,
}

impl Default for SpiralConfig {
    fn default() -> Self {
        SpiralConfig { order: 6, shifts: vec![0.0, 0.75, 1.25], fixed_ls: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SchmidtConfig {
    pub order: u32,
    pub shifts: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
    pub b_convention: BConvention,
}

impl Default for SchmidtConfig {
    fn default() -> Self {
        let sp = SchmidtParams::default();
        SchmidtConfig {
            order: 6,
            shifts: (0..8).map(|k| 0.25 * k as f64).collect(),
            alpha: sp.alpha,
            beta: sp.beta,
            b_convention: sp.b_convention,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TomoConfig {
    pub order: u32,
    pub shifts: Vec<f64>,
    /// Nonzero OAM index of the qubit `{|l⟩, |0⟩}`.
    pub l: i32,
    /// Integration scale N per setting.
    pub counts: u64,
    pub noise: bool,
    pub seed: u64,
}

impl Default for TomoConfig {
    fn default() -> Self {
        TomoConfig { order: 2, shifts: vec![0.0, 0.25, 0.5], l: 2, counts: 100_000, noise: false, seed: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub formats: Vec<OutputFormat>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { directory: PathBuf::from("out"), formats: vec![OutputFormat::Csv, OutputFormat::Json] }
    }
}

impl OutputConfig {
    pub fn wants(&self, f: OutputFormat) -> bool {
        self.formats.contains(&f)
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(src: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(src).map_err(|e| Error::Validation {
            line: e.span().map(|s| line_at(src, s.start)),
            message: e.message().trim().to_string(),
        })?;
        cfg.check(Some(src))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path)
            .map_err(|e| Error::Validation { line: None, message: format!("{}: {e}", path.display()) })?;
        Self::from_toml_str(&src)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Numerical(format!("config serialization: {e}")))
    }

    /// Hex SHA-256 of the canonical serialization, output directory excluded.
    pub fn hash(&self) -> Result<String> {
        let mut physics = self.clone();
        physics.output.directory = PathBuf::new();
        Ok(hex::encode(Sha256::digest(physics.to_toml_string()?.as_bytes())))
    }

    pub fn validate(&self) -> Result<()> {
        self.check(None)
    }

    pub fn crystal(&self) -> CrystalParams {
        let c = &self.crystal;
        CrystalParams {
            length: c.length,
            lambda_p: self.pump.lambda_p,
            lambda_s: c.lambda_s,
            lambda_i: c.lambda_i,
            w_p: c.w_p,
            w_s: c.w_s,
            w_i: c.w_i,
        }
    }

    pub fn schmidt_params(&self) -> SchmidtParams {
        SchmidtParams {
            alpha: self.schmidt.alpha,
            beta: self.schmidt.beta,
            b_convention: self.schmidt.b_convention,
        }
    }

    pub fn pump_spec(&self, m: u32, shift: f64) -> PumpSpec {
        PumpSpec::new(m, shift, self.pump.w_g, self.pump.lambda_p).with_profile(self.pump.profile)
    }

    /// Grid at the spiral phase plate, half-width `extent_factor · w_G`.
    pub fn plate_grid(&self) -> Result<Grid> {
        Grid::new(self.numerics.grid_n, self.numerics.extent_factor * self.pump.w_g)
    }

    /// Grid at the crystal, half-width `extent_factor` times the widest waist.
    pub fn crystal_grid(&self) -> Result<Grid> {
        Grid::new(self.numerics.grid_n, self.numerics.extent_factor * self.crystal().max_waist())
    }

    pub fn spectrum_range(&self) -> Result<LRange> {
        LRange::new(self.numerics.spectrum_l[0], self.numerics.spectrum_l[1])
    }

    pub fn joint_ranges(&self) -> Result<(LRange, LRange)> {
        let [a, b] = self.numerics.signal_l;
        let [c, d] = self.numerics.idler_l;
        Ok((LRange::new(a, b)?, LRange::new(c, d)?))
    }

    fn check(&self, src: Option<&str>) -> Result<()> {
        let at = |section: &str, key: &str, msg: String| Error::Validation {
            line: src.and_then(|s| line_of(s, section, key)),
            message: format!("[{section}] {key}: {msg}"),
        };
        let lib = |section: &'static str, key: &'static str| {
            move |e: Error| match e {
                Error::Config(m) => at(section, key, m),
                Error::OutOfRange { index, min, max } => at(section, key, format!("{index} outside [{min}, {max}]")),
                other => other,
            }
        };

        let p = &self.pump;
        check_orders(&p.orders).map_err(|m| at("pump", "orders", m))?;
        check_shifts(&p.shifts, self.numerics.extent_factor).map_err(|m| at("pump", "shifts", m))?;
        positive(p.w_g).map_err(|m| at("pump", "w_g", m))?;
        positive(p.lambda_p).map_err(|m| at("pump", "lambda_p", m))?;

        let crystal = self.crystal();
        for (key, v) in [
            ("length", crystal.length),
            ("w_p", crystal.w_p),
            ("w_s", crystal.w_s),
            ("w_i", crystal.w_i),
            ("lambda_s", crystal.lambda_s),
            ("lambda_i", crystal.lambda_i),
        ] {
            positive(v).map_err(|m| at("crystal", key, m))?;
        }
        crystal.validate().map_err(lib("crystal", "lambda_i"))?;

        let n = &self.numerics;
        if !(n.extent_factor > 0.0 && n.extent_factor.is_finite()) {
            return Err(at("numerics", "extent_factor", format!("must be positive, got {}", n.extent_factor)));
        }
        let plate = self.plate_grid().map_err(lib("numerics", "grid_n"))?;
        let at_crystal = self.crystal_grid().map_err(lib("numerics", "grid_n"))?;
        self.spectrum_range().map_err(lib("numerics", "spectrum_l"))?;
        LRange::new(n.signal_l[0], n.signal_l[1]).map_err(lib("numerics", "signal_l"))?;
        let (ls, li) = self.joint_ranges().map_err(lib("numerics", "idler_l"))?;
        for m in &p.orders {
            LgParams::new(*m as i32, 0, p.w_g).check_resolved(&plate).map_err(lib("numerics", "grid_n"))?;
        }
        let widest = ls.min.abs().max(ls.max.abs());
        LgParams::new(widest, 0, crystal.w_s).check_resolved(&at_crystal).map_err(lib("numerics", "signal_l"))?;
        let widest = li.min.abs().max(li.max.abs());
        LgParams::new(widest, 0, crystal.w_i).check_resolved(&at_crystal).map_err(lib("numerics", "idler_l"))?;
        let crystal_extent = n.extent_factor * crystal.max_waist() / crystal.w_p;

        let s = &self.spiral;
        check_orders(&[s.order]).map_err(|m| at("spiral", "order", m))?;
        check_shifts(&s.shifts, crystal_extent).map_err(|m| at("spiral", "shifts", m))?;
        ls.index(s.fixed_ls).map_err(lib("spiral", "fixed_ls"))?;

        let k = &self.schmidt;
        check_orders(&[k.order]).map_err(|m| at("schmidt", "order", m))?;
        check_shifts(&k.shifts, crystal_extent).map_err(|m| at("schmidt", "shifts", m))?;
        positive(k.alpha).map_err(|m| at("schmidt", "alpha", m))?;
        positive(k.beta).map_err(|m| at("schmidt", "beta", m))?;

        let t = &self.tomo;
        check_orders(&[t.order]).map_err(|m| at("tomo", "order", m))?;
        check_shifts(&t.shifts, crystal_extent).map_err(|m| at("tomo", "shifts", m))?;
        if t.l == 0 {
            return Err(at("tomo", "l", "qubit OAM index must be nonzero".into()));
        }
        for r in [ls, li] {
            for l in [0, t.l] {
                r.index(l).map_err(lib("tomo", "l"))?;
            }
        }
        if t.counts == 0 {
            return Err(at("tomo", "counts", "counts per setting must be > 0".into()));
        }

        if self.output.formats.is_empty() {
            return Err(at("output", "formats", "at least one output format is required".into()));
        }
        Ok(())
    }
}

fn positive(v: f64) -> std::result::Result<(), String> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(format!("must be positive, got {v}"))
    }
}

fn check_orders(orders: &[u32]) -> std::result::Result<(), String> {
    if orders.is_empty() {
        return Err("order list is empty".into());
    }
    match orders.iter().find(|&&m| m > MAX_WINDING) {
        Some(m) => Err(format!("winding number {m} exceeds supported maximum {MAX_WINDING}")),
        None => Ok(()),
    }
}

/// Shifts must be non-negative, distinct after file-name rounding, and keep the
/// singularity inside a grid of half-width `max_ratio` beam radii.
fn check_shifts(shifts: &[f64], max_ratio: f64) -> std::result::Result<(), String> {
    if shifts.is_empty() {
        return Err("shift list is empty".into());
    }
    let mut tags = Vec::with_capacity(shifts.len());
    for &s in shifts {
        if !(s >= 0.0 && s.is_finite()) {
            return Err(format!("shift ratio must be >= 0, got {s}"));
        }
        if s >= max_ratio {
            return Err(format!("shift ratio {s} puts the singularity outside the grid"));
        }
        let tag = shift_tag(s);
        if tags.contains(&tag) {
            return Err(format!("duplicate shift ratio {s}"));
        }
        tags.push(tag);
    }
    Ok(())
}

/// File-name form of a shift ratio, `1.25 → "1p250"`.
pub fn shift_tag(s: f64) -> String {
    format!("{s:.3}").replace('.', "p")
}

fn line_at(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].matches('\n').count() + 1
}

/// 1-based line of `key` inside `[section]`, else of the section header.
fn line_of(src: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    let mut header = None;
    for (i, raw) in src.lines().enumerate() {
        let line = raw.trim();
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.split(']').next()) {
            current = name.trim().to_string();
            if current == section {
                header = Some(i + 1);
            }
            continue;
        }
        if current == section {
            if let Some(rest) = line.strip_prefix(key) {
                if rest.trim_start().starts_with('=') {
                    return Some(i + 1);
                }
            }
        }
    }
    header
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_round_trip() {
        let cfg = ExperimentConfig::default();
        cfg.validate().unwrap();
        let text = cfg.to_toml_string().unwrap();
        let back = ExperimentConfig::from_toml_str(&text).unwrap();
        assert_eq!(cfg, back);
        assert_eq!(cfg.hash().unwrap(), back.hash().unwrap());
        assert_eq!(cfg.hash().unwrap().len(), 64);
        let mut moved = cfg.clone();
        moved.output.directory = PathBuf::from("elsewhere");
        assert_eq!(moved.hash().unwrap(), cfg.hash().unwrap());
        moved.tomo.seed += 1;
        assert_ne!(moved.hash().unwrap(), cfg.hash().unwrap());
    }

    #[test]
    fn empty_file_means_defaults() {
        assert_eq!(ExperimentConfig::from_toml_str("").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn unknown_key_is_rejected_with_line() {
        let src = "[pump]\norders = [2]\nw_gg = 1e-3\n";
        match ExperimentConfig::from_toml_str(src).unwrap_err() {
            Error::Validation { line, message } => {
                assert_eq!(line, Some(3));
                assert!(message.contains("w_gg"), "{message}");
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn semantic_errors_point_at_the_key() {
        let cases = [
            ("[pump]\nshifts = []\n", 2, "empty"),
            ("[tomo]\nseed = 3\ncounts = 0\n", 3, "counts"),
            ("[spiral]\n\nfixed_ls = 40\n", 3, "fixed_ls"),
            ("[crystal]\nw_p = -1.0\n", 2, "w_p"),
            ("[crystal]\nlambda_i = 700e-9\n", 2, "energy"),
            ("[tomo]\nl = 0\n", 2, "nonzero"),
        ];
        for (src, want, needle) in cases {
            let err = ExperimentConfig::from_toml_str(src).unwrap_err();
            assert_eq!(err.exit_code(), 1);
            match err {
                Error::Validation { line, message } => {
                    assert_eq!(line, Some(want), "{src}: {message}");
                    assert!(message.contains(needle), "{message}");
                }
                e => panic!("unexpected {e:?}"),
            }
        }
    }

    #[test]
    fn malformed_toml_is_a_validation_error() {
        let err = ExperimentConfig::from_toml_str("[pump\norders = 2").unwrap_err();
        assert!(matches!(err, Error::Validation { line: Some(1), .. }), "{err:?}");
    }

    #[test]
    fn unresolved_grid_is_rejected() {
        let src = "[numerics]\ngrid_n = 32\n";
        assert!(ExperimentConfig::from_toml_str(src).is_err());
    }

    #[test]
    fn shift_tags() {
        assert_eq!(shift_tag(0.0), "0p000");
        assert_eq!(shift_tag(1.25), "1p250");
        assert!(check_shifts(&[0.5, 0.5], 6.0).is_err());
        assert!(check_shifts(&[7.0], 6.0).is_err());
    }
}
