mod common;

use num_complex::Complex64;
use proptest::prelude::*;

use oamspdc::fieldgrid::{lg_mode, Grid, LgParams, ScalarField};
use oamspdc::oamspec::{power_spectrum, LRange};
use oamspdc::spdc::{azimuthal_schmidt, band_schmidt, band_table, joint_spectrum, CrystalParams, JointSpectrum};
use oamspdc::tomo::{
    fidelity, linear_inversion, reconstruct, run_tomography, run_tomography_seeded, subspace_state, QubitBasis,
};
use oamspdc::vortex::{far_field, pump_at_crystal, synthesize_shifted_vortex, PumpSpec};

const W: f64 = 1.2e-3;

fn plate() -> Grid {
    Grid::new(256, 6.0 * W).unwrap()
}

fn crystal_setup() -> (CrystalParams, Grid) {
    let c = CrystalParams::default();
    let g = Grid::new(128, 6.0 * c.max_waist()).unwrap();
    (c, g)
}

fn rotate_quarter(f: &ScalarField) -> ScalarField {
    let n = f.grid().n();
    let amp = (0..n * n)
        .map(|idx| {
            let (k, j) = (idx / n, idx % n);
            f.at(k, n - 1 - j)
        })
        .collect();
    ScalarField::new(*f.grid(), amp).unwrap()
}

fn max_weight_diff(a: &oamspdc::oamspec::OamSpectrum, b: &oamspdc::oamspec::OamSpectrum) -> f64 {
    a.iter().zip(b.iter()).map(|((_, p), (_, q))| (p - q).abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn lg_modes_have_unit_norm(l in -8i32..=8, p in 0u32..=3) {
        let g = Grid::new(256, 6.0).unwrap();
        let m = lg_mode(LgParams::new(l, p, 1.0), &g).unwrap();
        prop_assert!((m.power() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn spectrum_captures_all_power(m in 0u32..=6, s in 0.0f64..1.5) {
        let g = Grid::new(512, 6.0 * W).unwrap();
        let f = synthesize_shifted_vortex(&PumpSpec::new(m, s, W, 405e-9), &g).unwrap();
        let spec = power_spectrum(&f, LRange::symmetric(12).unwrap()).unwrap();
        prop_assert!((spec.captured_fraction - 1.0).abs() < 1e-6, "captured {}", spec.captured_fraction);
        prop_assert!((spec.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(spec.warning.is_none());
    }

    #[test]
    fn spectrum_ignores_rotation_and_global_phase(m in 0u32..=6, s in 0.0f64..1.5, phase in 0.0f64..6.3) {
        let f = synthesize_shifted_vortex(&PumpSpec::new(m, s, W, 405e-9), &plate()).unwrap();
        let range = LRange::symmetric(12).unwrap();
        let base = power_spectrum(&f, range).unwrap();
        let rot = power_spectrum(&rotate_quarter(&f), range).unwrap();
        let z = Complex64::from_polar(1.0, phase);
        let phased = ScalarField::new(*f.grid(), f.amp().iter().map(|a| a * z).collect()).unwrap();
        let ph = power_spectrum(&phased, range).unwrap();
        prop_assert!(max_weight_diff(&base, &rot) < 1e-6);
        prop_assert!(max_weight_diff(&base, &ph) < 1e-12);
    }

    #[test]
    fn far_field_keeps_oam_spectrum(m in 0u32..=5, s in 0.0f64..1.5) {
        let g = Grid::fourier_balanced(256, W).unwrap();
        let f = synthesize_shifted_vortex(&PumpSpec::new(m, s, W, 405e-9), &g).unwrap();
        let range = LRange::symmetric(12).unwrap();
        let near = power_spectrum(&f, range).unwrap();
        let far = power_spectrum(&far_field(&f).unwrap(), range).unwrap();
        prop_assert!(max_weight_diff(&near, &far) < 1e-3);
    }

    #[test]
    fn shifting_only_moves_weight_downward(m in 1u32..=6, s1 in 0.0f64..1.5, ds in 0.05f64..1.0) {
        let range = LRange::symmetric(12).unwrap();
        let a = power_spectrum(&synthesize_shifted_vortex(&PumpSpec::new(m, s1, W, 405e-9), &plate()).unwrap(), range).unwrap();
        let b = power_spectrum(&synthesize_shifted_vortex(&PumpSpec::new(m, s1 + ds, W, 405e-9), &plate()).unwrap(), range).unwrap();
        prop_assert!(b.mean() <= a.mean() + 1e-9, "<l> {} -> {}", a.mean(), b.mean());
        let stray: f64 = b.iter().filter(|(l, _)| *l < 0 || *l > m as i32).map(|(_, p)| p).sum();
        prop_assert!(stray < 1e-6, "weight outside 0..=m: {stray}");
    }

    #[test]
    fn probabilities_are_conjugation_invariant(m in 0u32..=4, s in 0.0f64..1.5) {
        let (c, g) = crystal_setup();
        let pump = pump_at_crystal(&PumpSpec::new(m, s, W, c.lambda_p), c.w_p, &g).unwrap();
        let r = LRange::new(-4, 6).unwrap();
        let j = joint_spectrum(&pump, r, r, &c).unwrap();
        let conj = JointSpectrum::from_amplitudes(r, r, j.amps.iter().map(|a| a.conj()).collect()).unwrap();
        prop_assert_eq!(&j.probs, &conj.probs);
    }

    #[test]
    fn asymmetry_never_removes_bands(m in 1u32..=6, s in 0.1f64..1.0) {
        let (c, g) = crystal_setup();
        let r = LRange::new(-6, 8).unwrap();
        let count = |shift: f64| {
            let pump = pump_at_crystal(&PumpSpec::new(m, shift, W, c.lambda_p), c.w_p, &g).unwrap();
            band_table(&joint_spectrum(&pump, r, r, &c).unwrap()).unwrap().len()
        };
        prop_assert!(count(s) >= count(0.0));
    }

    #[test]
    fn schmidt_number_matches_purity(
        rows in 1usize..6,
        cols in 1usize..6,
        seed in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 36),
    ) {
        let amps: Vec<Complex64> = seed.iter().take(rows * cols).map(|&(a, b)| Complex64::new(a, b)).collect();
        prop_assume!(amps.iter().any(|a| a.norm() > 1e-3));
        let j = JointSpectrum::from_amplitudes(
            LRange::new(0, rows as i32 - 1).unwrap(),
            LRange::new(0, cols as i32 - 1).unwrap(),
            amps.clone(),
        ).unwrap();
        let k = azimuthal_schmidt(&j).unwrap();
        let want = common::purity_schmidt(&amps, rows, cols);
        prop_assert!((k - want).abs() < 1e-9 * want, "{k} vs {want}");
        prop_assert!(k >= 1.0 - 1e-12 && k <= rows.min(cols) as f64 + 1e-9);
    }

    #[test]
    fn reconstruction_is_physical_and_exact(
        cells in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 9),
        l in prop_oneof![Just(-2i32), Just(1), Just(2)],
    ) {
        let r = LRange::new(-2, 2).unwrap();
        let mut amps = vec![Complex64::new(0.0, 0.0); 25];
        let sites = [l, 0];
        for (k, &(a, b)) in cells.iter().take(4).enumerate() {
            let (s, i) = (sites[k / 2], sites[k % 2]);
            amps[r.index(s).unwrap() * 5 + r.index(i).unwrap()] = Complex64::new(a, b);
        }
        // leakage outside the qubit subspace
        for &(a, b) in &cells[4..] {
            let idx = ((a.abs() * 1e4) as usize) % 25;
            if amps[idx].norm() == 0.0 {
                amps[idx] = Complex64::new(0.3 * a, 0.3 * b);
            }
        }
        let j = JointSpectrum::from_amplitudes(r, r, amps).unwrap();
        let basis = QubitBasis::new(l).unwrap();
        let target = match subspace_state(&j, &basis) {
            Ok(t) => t,
            Err(_) => return Ok(()),
        };
        let records = run_tomography::<rand_chacha::ChaCha8Rng>(&j, &basis, 1u64 << 60, None).unwrap();
        let raw = linear_inversion(&records).unwrap();
        prop_assert!(raw.hermiticity_error() < 1e-9);
        let rho = reconstruct(&records).unwrap();
        prop_assert!(rho.hermiticity_error() < 1e-9);
        prop_assert!((rho.trace() - 1.0).abs() < 1e-9);
        prop_assert!(rho.eigenvalues()[0] >= -1e-9);
        prop_assert!(rho.max_diff(&target) < 1e-6, "diff {}", rho.max_diff(&target));
        let f = fidelity(&rho, &basis);
        prop_assert!((0.0..=1.0).contains(&f));
    }

    #[test]
    fn noisy_reconstruction_is_physical(seed in any::<u64>(), scale in 10u64..100_000) {
        let r = LRange::new(0, 2).unwrap();
        let mut amps = vec![Complex64::new(0.0, 0.0); 9];
        amps[2 * 3] = Complex64::new(0.6, 0.0);
        amps[2] = Complex64::new(0.0, 0.7);
        amps[4] = Complex64::new(0.2, 0.0);
        let j = JointSpectrum::from_amplitudes(r, r, amps).unwrap();
        let basis = QubitBasis::new(2).unwrap();
        let recs = run_tomography_seeded(&j, &basis, scale, true, seed).unwrap();
        prop_assert_eq!(&recs, &run_tomography_seeded(&j, &basis, scale, true, seed).unwrap());
        if let Ok(rho) = reconstruct(&recs) {
            prop_assert!(rho.hermiticity_error() < 1e-9);
            prop_assert!((rho.trace() - 1.0).abs() < 1e-9);
            prop_assert!(rho.eigenvalues()[0] >= -1e-9);
        }
    }
}

#[test]
fn centred_pump_conserves_oam() {
    let (c, g) = crystal_setup();
    let r = LRange::new(-6, 9).unwrap();
    for m in 0..=6 {
        let pump = pump_at_crystal(&PumpSpec::new(m, 0.0, W, c.lambda_p), c.w_p, &g).unwrap();
        let j = joint_spectrum(&pump, r, r, &c).unwrap();
        let peak = j.amps.iter().map(|a| a.norm()).fold(0.0, f64::max);
        for ls in r.iter() {
            for li in r.iter().filter(|li| ls + li != m as i32) {
                assert!(j.amp(ls, li).unwrap().norm() < 1e-8 * peak, "m={m} C({ls},{li})");
            }
        }
        let band = band_schmidt(&j, m as i32).unwrap();
        assert!((band.k - azimuthal_schmidt(&j).unwrap()).abs() < 1e-9);
        assert!((band.weight - 1.0).abs() < 1e-9);
    }
}

#[test]
fn gaussian_pump_spiral_spectrum_is_symmetric() {
    let (c, g) = crystal_setup();
    let r = LRange::symmetric(8).unwrap();
    let pump = pump_at_crystal(&PumpSpec::new(0, 0.0, W, c.lambda_p), c.w_p, &g).unwrap();
    let j = joint_spectrum(&pump, r, r, &c).unwrap();
    let mut last = f64::INFINITY;
    for l in 0..=8 {
        let a = j.prob(l, -l).unwrap();
        let b = j.prob(-l, l).unwrap();
        assert!((a - b).abs() <= 1e-6 * a.max(b));
        assert!(a <= last * (1.0 + 1e-12), "P({l}) = {a} after {last}");
        last = a;
    }
}
