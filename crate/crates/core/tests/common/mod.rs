//! Brute-force references shared by the integration tests. Everything here works
//! from closed-form pointwise functions and fine Cartesian quadrature, never from
//! sampled fields or the polar decomposition.
#![allow(dead_code)]

use num_complex::Complex64;
use oamspdc::fieldgrid::{oracle_integrate, Grid, LgParams};
use oamspdc::spdc::CrystalParams;
use oamspdc::vortex::PumpSpec;

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// OAM weights of a displaced-core pump.
///
/// `((u - s) + iv)^m = Σ_k C(m,k) (-s)^(m-k) (u + iv)^k`, and each term is a pure
/// charge-k field, so `P_k` is the quadrature power of that term over the
/// quadrature power of the sum.
pub fn displaced_core_weights(spec: &PumpSpec, grid: &Grid, refinement: usize) -> Vec<(i32, f64)> {
    let w = spec.w;
    let s = spec.shift_ratio;
    let m = spec.m;
    let total = oracle_integrate(|x, y| Complex64::new(spec.unnormalized(x, y).norm_sqr(), 0.0), grid, refinement)
        .unwrap()
        .re;
    (0..=m)
        .map(|k| {
            let c = binomial(m, k) * (-s).powi((m - k) as i32);
            let term = oracle_integrate(
                |x, y| {
                    let (u, v) = (x / w, y / w);
                    let a = Complex64::new(u, v).powu(k) * (c * (-(u * u + v * v)).exp());
                    Complex64::new(a.norm_sqr(), 0.0)
                },
                grid,
                refinement,
            )
            .unwrap()
            .re;
            (k as i32, term / total)
        })
        .collect()
}

/// `C(l_s, l_i)` for a unit-power pump, from the closed-form integrand.
pub fn overlap_oracle(spec: &PumpSpec, crystal: &CrystalParams, l_s: i32, l_i: i32, grid: &Grid, refinement: usize) -> Complex64 {
    let pump = PumpSpec { w: crystal.w_p, ..*spec };
    let s = LgParams::new(l_s, 0, crystal.w_s);
    let i = LgParams::new(l_i, 0, crystal.w_i);
    let norm = oracle_integrate(|x, y| Complex64::new(pump.unnormalized(x, y).norm_sqr(), 0.0), grid, refinement)
        .unwrap()
        .re
        .sqrt();
    oracle_integrate(
        |x, y| pump.unnormalized(x, y) * (s.value(x, y) * i.value(x, y)).conj(),
        grid,
        refinement,
    )
    .unwrap()
        / norm
}

/// `⟨LG_{l,0}(w1) | LG_{l,0}(w2)⟩ = (2 w1 w2 / (w1² + w2²))^(|l|+1)`.
pub fn lg_waist_overlap(l: i32, w1: f64, w2: f64) -> f64 {
    (2.0 * w1 * w2 / (w1 * w1 + w2 * w2)).powi(l.abs() + 1)
}

/// `K = tr(ρ_s)² / tr(ρ_s²)` with `ρ_s = C C†`, by explicit matrix products.
pub fn purity_schmidt(amps: &[Complex64], rows: usize, cols: usize) -> f64 {
    let mut rho = vec![Complex64::new(0.0, 0.0); rows * rows];
    for a in 0..rows {
        for b in 0..rows {
            rho[a * rows + b] = (0..cols).map(|k| amps[a * cols + k] * amps[b * cols + k].conj()).sum();
        }
    }
    let tr: f64 = (0..rows).map(|a| rho[a * rows + a].re).sum();
    let tr2: f64 = (0..rows)
        .flat_map(|a| (0..rows).map(move |b| (a, b)))
        .map(|(a, b)| (rho[a * rows + b] * rho[b * rows + a]).re)
        .sum();
    tr * tr / tr2
}
