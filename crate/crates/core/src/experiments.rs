//! One function per experiment. Each reads only the config and
//! writes deterministic file names under `output.directory`.

use std::path::PathBuf;

use crate::config::{shift_tag, ExperimentConfig, OutputFormat};
use crate::error::{Error, Result};
use crate::fieldgrid::Grid;
use crate::oamspec::power_spectrum;
use crate::output::{num, write_csv, write_density_json, write_image_csv, write_matrix_csv, Meta};
use crate::spdc::{
    analytic_schmidt_gaussian, band_table, calibrate_b_convention, conditional_spectrum, joint_spectrum,
    schmidt_sweep, BConvention, K_THEO_ANCHOR,
};
use crate::tomo::{fidelity_sweep, QubitBasis};
use crate::vortex::{far_field, pump_at_crystal, synthesize_shifted_vortex};

/// Files written and human-readable summary lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub files: Vec<PathBuf>,
    pub lines: Vec<String>,
}

impl Report {
    fn file(&mut self, p: PathBuf) -> PathBuf {
        self.files.push(p.clone());
        p
    }
}

fn out_dir(cfg: &ExperimentConfig) -> Result<PathBuf> {
    let dir = cfg.output.directory.clone();
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn meta(cfg: &ExperimentConfig, grid: &Grid) -> Result<Meta> {
    Ok(Meta::new(&cfg.hash()?, cfg.schmidt.b_convention, grid))
}

fn csv_enabled(cfg: &ExperimentConfig) -> bool {
    cfg.output.wants(OutputFormat::Csv)
}

/// OAM spectrum of each `(m, shift)` pump at the plate, plus its far-field intensity.
///
/// The far field is sampled on a Fourier-balanced grid so that the image has the
/// same sampling in both planes.
pub fn cmd_pump_spectrum(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let dir = out_dir(cfg)?;
    let grid = cfg.plate_grid()?;
    let ff_grid = Grid::fourier_balanced(cfg.numerics.grid_n, cfg.pump.w_g)?;
    let range = cfg.spectrum_range()?;
    let mut report = Report::default();
    for &m in &cfg.pump.orders {
        for &s in &cfg.pump.shifts {
            let spec = cfg.pump_spec(m, s);
            let spectrum = power_spectrum(&synthesize_shifted_vortex(&spec, &grid)?, range)?;
            let ff = far_field(&synthesize_shifted_vortex(&spec, &ff_grid)?)?;
            let tag = format!("m{m}_s{}", shift_tag(s));
            report.lines.push(format!(
                "m={m} shift={s}: argmax l={} mean l={:.4} captured={:.6}",
                spectrum.argmax(),
                spectrum.mean(),
                spectrum.captured_fraction
            ));
            if let Some(w) = &spectrum.warning {
                report.lines.push(format!("  warning: {w}"));
            }
            if !csv_enabled(cfg) {
                continue;
            }
            let base = meta(cfg, &grid)?.with("m", m).with("shift_ratio", s);
            let mut sm = base.clone().with("captured_fraction", num(spectrum.captured_fraction));
            if let Some(w) = &spectrum.warning {
                sm = sm.with("warning", w);
            }
            let path = report.file(dir.join(format!("pump_{tag}_spectrum.csv")));
            write_csv(&path, &sm, &["l", "P_l"], spectrum.iter().map(|(l, p)| vec![l.to_string(), num(p)]))?;

            let lambda_f = ff_grid.n() as f64 * ff_grid.spacing().powi(2);
            let fm = Meta::new(&cfg.hash()?, cfg.schmidt.b_convention, &ff_grid)
                .with("m", m)
                .with("shift_ratio", s)
                .with("quantity", "far-field intensity, unit total power, rows y ascending, columns x ascending")
                .with("lambda_f_m2", num(lambda_f));
            let path = report.file(dir.join(format!("pump_{tag}_farfield.csv")));
            write_image_csv(&path, &fm, ff_grid.n(), &ff.intensity())?;
        }
    }
    Ok(report)
}

/// Joint coincidence probabilities per shift and the idler spectrum at fixed `l_s`.
pub fn cmd_spiral_spectrum(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let dir = out_dir(cfg)?;
    let grid = cfg.crystal_grid()?;
    let crystal = cfg.crystal();
    let (ls, li) = cfg.joint_ranges()?;
    let m = cfg.spiral.order;
    let fixed = cfg.spiral.fixed_ls;
    let mut report = Report::default();
    for &s in &cfg.spiral.shifts {
        let pump = pump_at_crystal(&cfg.pump_spec(m, s), crystal.w_p, &grid)?;
        let joint = joint_spectrum(&pump, ls, li, &crystal)?;
        let cond = conditional_spectrum(&joint, fixed)?;
        let bands = band_table(&joint)?;
        report.lines.push(format!(
            "m={m} shift={s}: {} bands above weight floor, edge fraction {:.3e}",
            bands.len(),
            joint.edge_fraction()
        ));
        if !csv_enabled(cfg) {
            continue;
        }
        let tag = format!("m{m}_s{}", shift_tag(s));
        let base = meta(cfg, &grid)?.with("m", m).with("shift_ratio", s);
        let rows: Vec<String> = ls.iter().map(|l| l.to_string()).collect();
        let cols: Vec<String> = li.iter().map(|l| l.to_string()).collect();
        let jm = base
            .clone()
            .with("quantity", "coincidence probability |C(l_s,l_i)|^2, normalized over the matrix")
            .with("edge_fraction", num(joint.edge_fraction()));
        let path = report.file(dir.join(format!("joint_{tag}.csv")));
        write_matrix_csv(&path, &jm, "l_s\\l_i", &rows, &cols, &joint.probs)?;

        let cm = base.with("fixed_l_s", fixed).with("quantity", "conditional idler probability");
        let path = report.file(dir.join(format!("conditional_{tag}_ls{fixed}.csv")));
        write_csv(&path, &cm, &["l_i", "P"], cond.iter().map(|(l, p)| vec![l.to_string(), num(p)]))?;
    }
    Ok(report)
}

/// Schmidt sweep over shifts plus the analytic Gaussian-pump value.
///
/// Per ratio the table lists every band above the weight floor, then three total
/// rows: `TOTAL` (SVD of the full matrix), `TOTAL_WEIGHTED` (`Σ w K`) and
/// `TOTAL_SUM` (`Σ K`).
pub fn cmd_schmidt(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let dir = out_dir(cfg)?;
    let grid = cfg.crystal_grid()?;
    let crystal = cfg.crystal();
    let (ls, li) = cfg.joint_ranges()?;
    let m = cfg.schmidt.order;
    let base = cfg.pump_spec(m, 0.0);
    let sweep = schmidt_sweep(&base, &cfg.schmidt.shifts, &crystal, &grid, ls, li)?;
    let analytic = analytic_schmidt_gaussian(&crystal, &cfg.schmidt_params());

    let mut report = Report::default();
    for row in &sweep {
        report.lines.push(format!(
            "shift={}: K_total={:.4} K_weighted={:.4} K_sum={:.4} bands={}",
            row.ratio,
            row.k_total,
            row.k_weighted,
            row.k_band_sum,
            row.bands.len()
        ));
    }
    report.lines.push(format!(
        "analytic Gaussian-pump K = {:.4} (b convention {}, b = {:.4e} m)",
        analytic.k, analytic.convention, analytic.b
    ));
    if !csv_enabled(cfg) {
        return Ok(report);
    }

    let mut rows = Vec::new();
    for row in &sweep {
        let r = num(row.ratio);
        let listed: f64 = row.bands.iter().map(|b| b.weight).sum();
        for b in &row.bands {
            rows.push(vec![r.clone(), b.l_p.to_string(), num(b.weight), num(b.k)]);
        }
        rows.push(vec![r.clone(), "TOTAL".into(), num(1.0), num(row.k_total)]);
        rows.push(vec![r.clone(), "TOTAL_WEIGHTED".into(), num(listed), num(row.k_weighted)]);
        rows.push(vec![r, "TOTAL_SUM".into(), num(listed), num(row.k_band_sum)]);
    }
    let sm = meta(cfg, &grid)?.with("m", m).with("band_weight_floor", crate::spdc::BAND_WEIGHT_FLOOR);
    let path = report.file(dir.join(format!("schmidt_m{m}.csv")));
    write_csv(&path, &sm, &["ratio", "band", "weight", "K"], rows)?;

    let am = meta(cfg, &grid)?.with("quantity", "Gaussian-pump analytic Schmidt number");
    let path = report.file(dir.join("schmidt_analytic.csv"));
    write_csv(
        &path,
        &am,
        &["b_convention", "b_m", "w_p_m", "alpha", "beta", "K"],
        [vec![
            analytic.convention.name().into(),
            num(analytic.b),
            num(crystal.w_p),
            num(cfg.schmidt.alpha),
            num(cfg.schmidt.beta),
            num(analytic.k),
        ]],
    )?;
    Ok(report)
}

/// Reconstructed density matrix per shift and the fidelity sweep.
pub fn cmd_tomography(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let dir = out_dir(cfg)?;
    let grid = cfg.crystal_grid()?;
    let t = &cfg.tomo;
    let basis = QubitBasis::new(t.l)?;
    let points = fidelity_sweep(
        &cfg.pump_spec(t.order, 0.0),
        &t.shifts,
        &cfg.crystal(),
        &grid,
        cfg.joint_ranges()?,
        &basis,
        t.counts,
        t.noise.then_some(t.seed),
    )?;
    let mut report = Report::default();
    let base = meta(cfg, &grid)?
        .with("m", t.order)
        .with("qubit_l", t.l)
        .with("counts_per_setting", t.counts)
        .with("noise", t.noise)
        .with("seed", t.seed);
    for p in &points {
        report.lines.push(format!("shift={}: F={:.6}", p.ratio, p.fidelity));
        if cfg.output.wants(OutputFormat::Json) {
            let jm = base.clone().with("shift_ratio", p.ratio).with("fidelity", num(p.fidelity));
            let name = format!("rho_m{}_s{}.json", t.order, shift_tag(p.ratio));
            let path = report.file(dir.join(name));
            write_density_json(&path, &jm, &p.rho)?;
        }
    }
    if csv_enabled(cfg) {
        let path = report.file(dir.join(format!("fidelity_m{}.csv", t.order)));
        let rows = points.iter().map(|p| vec![num(p.ratio), num(p.fidelity)]);
        write_csv(&path, &base, &["ratio", "F"], rows)?;
    }
    Ok(report)
}

/// Calibration result: the table and the chosen convention.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub selected: BConvention,
    pub report: Report,
}

/// Analytic K under each convention at the default crystal; selects the one
/// closest to the anchor regardless of the configured crystal.
pub fn cmd_calibrate_b(cfg: &ExperimentConfig) -> Result<Calibration> {
    cfg.validate()?;
    let (selected, table) = calibrate_b_convention(&cfg.schmidt_params());
    let mut report = Report::default();
    report.lines.push(format!("{:<28} {:>12} {:>8} {:>8}", "b_convention", "b_m", "K", "|K-K0|"));
    for a in &table {
        report.lines.push(format!(
            "{:<28} {:>12.4e} {:>8.4} {:>8.4}",
            a.convention.name(),
            a.b,
            a.k,
            (a.k - K_THEO_ANCHOR).abs()
        ));
    }
    report.lines.push(format!("selected: {selected}"));
    report.lines.push(String::new());
    report.lines.push("[schmidt]".into());
    report.lines.push(format!("b_convention = \"{selected}\""));
    if csv_enabled(cfg) {
        let dir = out_dir(cfg)?;
        let grid = cfg.crystal_grid()?;
        let m = meta(cfg, &grid)?.with("anchor_K", K_THEO_ANCHOR).with("selected", selected);
        let path = report.file(dir.join("calibrate_b.csv"));
        let rows = table.iter().map(|a| {
            vec![a.convention.name().into(), num(a.b), num(a.k), num((a.k - K_THEO_ANCHOR).abs())]
        });
        write_csv(&path, &m, &["b_convention", "b_m", "K", "abs_deviation"], rows)?;
    }
    Ok(Calibration { selected, report })
}

/// Config check only.
pub fn validate(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    Ok(Report { files: Vec::new(), lines: vec![format!("config OK, hash {}", cfg.hash()?)] })
}

/// Exit code for a command result.
pub fn exit_code<T>(r: &std::result::Result<T, Error>) -> i32 {
    match r {
        Ok(_) => 0,
        Err(e) => e.exit_code(),
    }
}
