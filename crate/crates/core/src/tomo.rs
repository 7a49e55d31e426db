//! Two-qubit tomography on the OAM subspace `{|l⟩, |0⟩} ⊗ {|l⟩, |0⟩}`.
//!
//! Each arm is projected onto one of `|l⟩`, `|0⟩`, `(|l⟩+|0⟩)/√2`, `(|l⟩+i|0⟩)/√2`.
//! The sixteen joint projections are inverted linearly and the estimate is pushed
//! back onto the physical cone by clipping negative eigenvalues.

use nalgebra::{DMatrix, DVector, Matrix4, Vector4};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::fieldgrid::Grid;
use crate::oamspec::LRange;
use crate::spdc::{joint_spectrum, CrystalParams, JointSpectrum};
use crate::vortex::{pump_at_crystal, PumpSpec};

/// Basis labels in matrix order.
pub const BASIS_LABELS: [&str; 4] = ["|l,l>", "|l,0>", "|0,l>", "|0,0>"];

/// The qubit `{|l⟩, |0⟩}` carried by each photon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QubitBasis {
    l: i32,
}

impl QubitBasis {
    pub fn new(l: i32) -> Result<Self> {
        if l == 0 {
            return Err(Error::config("qubit OAM index must be nonzero"));
        }
        Ok(QubitBasis { l })
    }

    pub fn l(&self) -> i32 {
        self.l
    }

    /// OAM index of qubit level 0 (`|l⟩`) and 1 (`|0⟩`).
    fn level(&self, k: usize) -> i32 {
        if k == 0 {
            self.l
        } else {
            0
        }
    }

    /// `(|l,0⟩ + |0,l⟩)/√2` in matrix order.
    pub fn bell_state(&self) -> Vector4<Complex64> {
        let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let z = Complex64::new(0.0, 0.0);
        Vector4::new(z, s, s, z)
    }
}

/// Single-photon projection `α|l⟩ + β|0⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmState {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl ArmState {
    pub const L: ArmState = ArmState::real(1.0, 0.0);
    pub const ZERO: ArmState = ArmState::real(0.0, 1.0);
    pub const DIAG: ArmState = ArmState::real(FRAC_1_SQRT_2, FRAC_1_SQRT_2);
    pub const CIRC: ArmState = ArmState {
        alpha: Complex64::new(FRAC_1_SQRT_2, 0.0),
        beta: Complex64::new(0.0, FRAC_1_SQRT_2),
    };
    pub const TETRAD: [ArmState; 4] = [ArmState::L, ArmState::ZERO, ArmState::DIAG, ArmState::CIRC];
    const NAMES: [&'static str; 4] = ["l", "0", "l+0", "l+i0"];

    const fn real(a: f64, b: f64) -> Self {
        ArmState { alpha: Complex64::new(a, 0.0), beta: Complex64::new(b, 0.0) }
    }

    fn coeff(&self, level: usize) -> Complex64 {
        if level == 0 {
            self.alpha
        } else {
            self.beta
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectorSetting {
    pub id: usize,
    pub signal: ArmState,
    pub idler: ArmState,
}

impl ProjectorSetting {
    /// The 16 tetrad × tetrad settings; `id = 4·signal + idler`.
    pub fn tomographic_set() -> Vec<ProjectorSetting> {
        (0..16)
            .map(|id| ProjectorSetting {
                id,
                signal: ArmState::TETRAD[id / 4],
                idler: ArmState::TETRAD[id % 4],
            })
            .collect()
    }

    pub fn label(&self) -> String {
        format!("{}|{}", ArmState::NAMES[self.id / 4], ArmState::NAMES[self.id % 4])
    }

    /// `|φ_s⟩ ⊗ |φ_i⟩` in matrix order.
    pub fn state(&self) -> Vector4<Complex64> {
        Vector4::from_fn(|k, _| self.signal.coeff(k / 2) * self.idler.coeff(k % 2))
    }
}

/// 4×4 density matrix in the basis [`BASIS_LABELS`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(pub Matrix4<Complex64>);

impl DensityMatrix {
    pub fn pure(psi: &Vector4<Complex64>) -> Result<Self> {
        let n = psi.norm_squared();
        if n <= 0.0 {
            return Err(Error::ZeroMatrix);
        }
        Ok(DensityMatrix(psi * psi.adjoint() / Complex64::new(n, 0.0)))
    }

    /// `I/4`.
    pub fn maximally_mixed() -> Self {
        DensityMatrix(Matrix4::identity() * Complex64::new(0.25, 0.0))
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.0[(r, c)]
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// Largest `|ρ - ρ†|` entry.
    pub fn hermiticity_error(&self) -> f64 {
        (self.0 - self.0.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Ascending eigenvalues of the Hermitian part.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let h = (self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        [ev[0], ev[1], ev[2], ev[3]]
    }

    pub fn real_parts(&self) -> [[f64; 4]; 4] {
        std::array::from_fn(|r| std::array::from_fn(|c| self.0[(r, c)].re))
    }

    pub fn imag_parts(&self) -> [[f64; 4]; 4] {
        std::array::from_fn(|r| std::array::from_fn(|c| self.0[(r, c)].im))
    }

    /// Largest entrywise difference.
    pub fn max_diff(&self, other: &DensityMatrix) -> f64 {
        (self.0 - other.0).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// One tomographic setting: expected probability and the counts it produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountRecord {
    pub setting: ProjectorSetting,
    pub rate: f64,
    pub counts: u64,
    /// Integration scale N (expected counts = N·rate).
    pub scale: u64,
}

/// `|Σ conj(a_s) conj(a_i) C|² / Σ|C|²` over the `{0, l}` cells.
///
/// Amplitude outside the qubit subspace stays in the normalization.
pub fn projection_probability(
    joint: &JointSpectrum,
    basis: &QubitBasis,
    setting: &ProjectorSetting,
) -> Result<f64> {
    let total = joint.total_weight();
    if total <= 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let mut a = Complex64::new(0.0, 0.0);
    for s in 0..2 {
        for i in 0..2 {
            let c = joint.amp(basis.level(s), basis.level(i))?;
            a += (setting.signal.coeff(s) * setting.idler.coeff(i)).conj() * c;
        }
    }
    Ok(a.norm_sqr() / total)
}

/// Normalized two-photon state restricted to the qubit subspace.
pub fn subspace_state(joint: &JointSpectrum, basis: &QubitBasis) -> Result<DensityMatrix> {
    let mut psi = Vector4::zeros();
    for k in 0..4 {
        psi[k] = joint.amp(basis.level(k / 2), basis.level(k % 2))?;
    }
    DensityMatrix::pure(&psi)
}

/// Evaluates all 16 settings. Counts are `round(N·rate)` without `rng`, otherwise
/// Poisson draws with mean `N·rate`.
pub fn run_tomography<R: Rng + ?Sized>(
    joint: &JointSpectrum,
    basis: &QubitBasis,
    scale: u64,
    mut rng: Option<&mut R>,
) -> Result<Vec<CountRecord>> {
    if scale == 0 {
        return Err(Error::config("counts per setting must be > 0"));
    }
    ProjectorSetting::tomographic_set()
        .into_iter()
        .map(|setting| {
            let rate = projection_probability(joint, basis, &setting)?.clamp(0.0, 1.0);
            let mean = scale as f64 * rate;
            let counts = match rng.as_deref_mut() {
                None => mean.round() as u64,
                Some(_) if mean <= 0.0 => 0,
                Some(r) => Poisson::new(mean)
                    .map_err(|e| Error::Numerical(format!("Poisson mean {mean}: {e}")))?
                    .sample(r) as u64,
            };
            Ok(CountRecord { setting, rate, counts, scale })
        })
        .collect()
}

/// [`run_tomography`] with an optional seeded Poisson source.
pub fn run_tomography_seeded(
    joint: &JointSpectrum,
    basis: &QubitBasis,
    scale: u64,
    noise: bool,
    seed: u64,
) -> Result<Vec<CountRecord>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    run_tomography(joint, basis, scale, noise.then_some(&mut rng))
}

/// Hermitian basis: four diagonal units, then `E_ab + E_ba` and `-i E_ab + i E_ba`.
fn hermitian_basis() -> Vec<Matrix4<Complex64>> {
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let mut out = Vec::with_capacity(16);
    for a in 0..4 {
        let mut m = Matrix4::zeros();
        m[(a, a)] = one;
        out.push(m);
    }
    for a in 0..4 {
        for b in a + 1..4 {
            let mut x = Matrix4::zeros();
            x[(a, b)] = one;
            x[(b, a)] = one;
            out.push(x);
            let mut y = Matrix4::zeros();
            y[(a, b)] = -i;
            y[(b, a)] = i;
            out.push(y);
        }
    }
    out
}

/// Linear inversion of the 16 rates, then eigenvalue clipping and trace renormalization.
pub fn reconstruct(records: &[CountRecord]) -> Result<DensityMatrix> {
    let rho = linear_inversion(records)?;
    physical_projection(&rho)
}

/// Unconstrained estimate: Hermitian by construction, trace not fixed.
pub fn linear_inversion(records: &[CountRecord]) -> Result<DensityMatrix> {
    if records.len() != 16 {
        return Err(Error::Numerical(format!("expected 16 records, got {}", records.len())));
    }
    let basis = hermitian_basis();
    let design = DMatrix::from_fn(16, 16, |j, k| {
        let phi = records[j].setting.state();
        (phi.adjoint() * basis[k] * phi)[(0, 0)].re
    });
    let rates = DVector::from_iterator(
        16,
        records.iter().map(|r| r.counts as f64 / r.scale as f64),
    );
    let coeffs = design
        .lu()
        .solve(&rates)
        .ok_or_else(|| Error::Numerical("tomographic design matrix is singular".into()))?;
    let rho = basis
        .iter()
        .zip(coeffs.iter())
        .fold(Matrix4::zeros(), |acc, (g, c)| acc + g * Complex64::new(*c, 0.0));
    Ok(DensityMatrix(rho))
}

/// Nearest PSD, unit-trace matrix with the same eigenvectors.
pub fn physical_projection(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let h = (rho.0 + rho.0.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let clipped: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total <= 0.0 {
        return Err(Error::Numerical("reconstructed state has no positive weight".into()));
    }
    let mut out = Matrix4::zeros();
    for (k, &lam) in clipped.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        out += v * v.adjoint() * Complex64::new(lam / total, 0.0);
    }
    // exact Hermitian symmetry
    out = (out + out.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(DensityMatrix(out))
}

/// `⟨ψ|ρ|ψ⟩` against `(|l,0⟩ + |0,l⟩)/√2`.
pub fn fidelity(rho: &DensityMatrix, basis: &QubitBasis) -> f64 {
    let psi = basis.bell_state();
    (psi.adjoint() * rho.0 * psi)[(0, 0)].re.clamp(0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FidelityPoint {
    pub ratio: f64,
    pub fidelity: f64,
    pub rho: DensityMatrix,
}

/// Pump → joint spectrum → tomography → reconstruction → fidelity, per shift.
///
/// With `noise`, one seeded generator is consumed across the shifts in order.
#[allow(clippy::too_many_arguments)]
pub fn fidelity_sweep(
    base: &PumpSpec,
    shifts: &[f64],
    crystal: &CrystalParams,
    grid: &Grid,
    ranges: (LRange, LRange),
    basis: &QubitBasis,
    scale: u64,
    noise: Option<u64>,
) -> Result<Vec<FidelityPoint>> {
    let mut rng = noise.map(ChaCha8Rng::seed_from_u64);
    shifts
        .iter()
        .map(|&ratio| {
            let spec = PumpSpec { shift_ratio: ratio, ..*base };
            let pump = pump_at_crystal(&spec, crystal.w_p, grid)?;
            let joint = joint_spectrum(&pump, ranges.0, ranges.1, crystal)?;
            let records = run_tomography(&joint, basis, scale, rng.as_mut())?;
            let rho = reconstruct(&records)?;
            Ok(FidelityPoint { ratio, fidelity: fidelity(&rho, basis), rho })
        })
        .collect()
}
