mod common;

use common::{displaced_core_weights, lg_waist_overlap, overlap_oracle};
use num_complex::Complex64;
use oamspdc::fieldgrid::{inner_product, lg_mode, oracle_integrate, Grid, LgParams};
use oamspdc::oamspec::{power_spectrum, LRange};
use oamspdc::spdc::{overlap_coefficient, CrystalParams};
use oamspdc::vortex::{pump_at_crystal, synthesize_shifted_vortex, PumpSpec};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn oam_weights_match_binomial_quadrature() {
    let w = 1.2e-3;
    let grid = Grid::new(256, 6.0 * w).unwrap();
    for (m, s) in [(2, 0.5), (4, 0.5), (6, 1.0)] {
        let spec = PumpSpec::new(m, s, w, 405e-9);
        let spectrum = power_spectrum(&synthesize_shifted_vortex(&spec, &grid).unwrap(), LRange::symmetric(12).unwrap()).unwrap();
        for (l, p) in displaced_core_weights(&spec, &grid, 4) {
            if p > 1e-4 {
                assert!(rel(spectrum.weight(l), p) < 1e-3, "m={m} s={s} l={l}: {} vs {p}", spectrum.weight(l));
            } else {
                assert!((spectrum.weight(l) - p).abs() < 1e-7);
            }
        }
    }
}

#[test]
fn overlaps_match_quadrature() {
    let crystal = CrystalParams::default();
    let grid = Grid::new(256, 6.0 * crystal.max_waist()).unwrap();
    let spec = PumpSpec::new(2, 0.5, 1.2e-3, crystal.lambda_p);
    let pump = pump_at_crystal(&spec, crystal.w_p, &grid).unwrap();
    for (ls, li) in [(1, 1), (2, 0), (0, 0), (3, -1), (1, -1)] {
        let got = overlap_coefficient(&pump, ls, li, &crystal).unwrap();
        let want = overlap_oracle(&spec, &crystal, ls, li, &grid, 4);
        assert!((got - want).norm() / want.norm() < 1e-3, "C({ls},{li}) {got} vs {want}");
    }
}

#[test]
fn mismatched_waists_follow_closed_form() {
    let w1 = 1.0;
    let w2 = 2.0;
    let grid = Grid::new(512, 12.0).unwrap();
    let a = lg_mode(LgParams::new(2, 0, w1), &grid).unwrap();
    let b = lg_mode(LgParams::new(2, 0, w2), &grid).unwrap();
    let want = lg_waist_overlap(2, w1, w2);
    assert!((want - 0.512).abs() < 1e-12);
    assert!((inner_product(&a, &b).unwrap().re - want).abs() < 1e-6);

    let (pa, pb) = (LgParams::new(2, 0, w1), LgParams::new(2, 0, w2));
    let brute = oracle_integrate(|x, y| pa.value(x, y).conj() * pb.value(x, y), &Grid::new(64, 12.0).unwrap(), 10).unwrap();
    assert!((brute - Complex64::new(want, 0.0)).norm() < 1e-6);
}
