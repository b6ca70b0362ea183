//! Zero-phase tests on `U_AB`: exact spectral decision, a direct simulation of
//! the phase-estimation network, and the check that each reflection factors
//! over its generator families.

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{max_abs, orthonormalize, unitary_eig, CMatrix, CVector, Projector, TolerancePolicy, C64};
use crate::loops::{PEInstance, Side};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub verdict: Verdict,
    pub p0: f64,
    pub threshold: f64,
    pub theta_star: f64,
}

/// Eigenphases of `U_AB` and the weight `|⟨v_j|ψ₀⟩|²` of each.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpectrum {
    pub phases: Vec<f64>,
    pub weights: Vec<f64>,
    /// `max_j ‖U v_j − e^{iθ_j} v_j‖`
    pub eigen_residual: f64,
}

impl PhaseSpectrum {
    /// `Σ_{|θ_j| ≤ θ*} |⟨v_j|ψ₀⟩|²`
    pub fn overlap(&self, theta_star: f64) -> f64 {
        self.phases.iter().zip(&self.weights).filter(|(th, _)| th.abs() <= theta_star).map(|(_, w)| w).sum()
    }

    /// `Σ_j |⟨v_j|ψ₀⟩|² F_M(θ_j)` with `M = 2^bits`.
    pub fn kernel_prediction(&self, bits: u32) -> f64 {
        let m = (1u64 << bits) as f64;
        self.phases.iter().zip(&self.weights).map(|(&th, w)| w * fejer(m, th)).sum()
    }
}

/// Probability that phase estimation with `m` register values reads 0 on an
/// eigenvector of phase `θ`: `sin²(mθ/2) / (m² sin²(θ/2))`.
pub fn fejer(m: f64, theta: f64) -> f64 {
    let s = (theta / 2.0).sin();
    if s.abs() < 1e-300 {
        return 1.0;
    }
    let r = (m * theta / 2.0).sin() / (m * s);
    r * r
}

pub fn spectrum(instance: &PEInstance) -> Result<PhaseSpectrum> {
    let u = instance.u_ab();
    let eig = unitary_eig(&u, instance.tolerance())?;
    let weights = eig.weights(&instance.psi0());
    Ok(PhaseSpectrum { eigen_residual: eig.eigen_residual(&u), phases: eig.phases, weights })
}

pub fn zero_phase_overlap(instance: &PEInstance, theta_star: f64) -> Result<f64> {
    Ok(spectrum(instance)?.overlap(theta_star))
}

fn check_constants(c_minus: f64, c_plus: f64) -> Result<()> {
    if !(1.0..=50.0).contains(&c_plus) {
        return Err(Error::InvalidConstants(format!("c₊ must lie in [1, 50], got {c_plus}")));
    }
    if !(c_minus >= 1.0 && c_minus.is_finite()) {
        return Err(Error::InvalidConstants(format!("𝒞₋ must be at least 1, got {c_minus}")));
    }
    Ok(())
}

/// `θ* = 1/√(c₊𝒞₋)`; positive iff the overlap with phases `|θ| ≤ θ*` is at
/// least `1/(2c₊)`.
pub fn decide_with(spectrum: &PhaseSpectrum, c_minus: f64, c_plus: f64) -> Result<Decision> {
    check_constants(c_minus, c_plus)?;
    let theta_star = 1.0 / (c_plus * c_minus).sqrt();
    let threshold = 1.0 / (2.0 * c_plus);
    let p0 = spectrum.overlap(theta_star);
    let verdict = if p0 >= threshold { Verdict::Positive } else { Verdict::Negative };
    Ok(Decision { verdict, p0, threshold, theta_star })
}

pub fn decide(instance: &PEInstance, c_minus: f64, c_plus: f64) -> Result<Decision> {
    check_constants(c_minus, c_plus)?;
    decide_with(&spectrum(instance)?, c_minus, c_plus)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QPEOutcome {
    pub bits: u32,
    /// Probability of each phase-register value `0..2^bits`.
    pub distribution: Vec<f64>,
}

impl QPEOutcome {
    pub fn p_zero(&self) -> f64 {
        self.distribution[0]
    }
}

pub const QPE_MAX_BITS: u32 = 20;
/// Largest `2^bits × dim` table of amplitudes the simulator will hold.
pub const QPE_MAX_CELLS: usize = 1 << 22;

/// Textbook phase estimation of `U_AB` on `ψ₀`.
///
/// The joint state after the controlled powers is `M^{-1/2} Σ_k |k⟩ U^k ψ₀`;
/// the inverse Fourier transform on the register gives amplitudes
/// `M^{-1} Σ_k e^{−2πi xk/M} U^k ψ₀` for outcome `x`. Every `U^k ψ₀` is
/// formed explicitly and the transform is taken coordinate by coordinate.
pub fn qpe_simulate(instance: &PEInstance, bits: u32) -> Result<QPEOutcome> {
    qpe_simulate_unitary(&instance.u_ab(), &instance.psi0(), bits)
}

pub fn qpe_simulate_unitary(u: &CMatrix, psi0: &CVector, bits: u32) -> Result<QPEOutcome> {
    let dim = psi0.len();
    if u.nrows() != dim || u.ncols() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: u.nrows() });
    }
    if bits > QPE_MAX_BITS {
        return Err(Error::GuardExceeded(format!("{bits} register bits, at most {QPE_MAX_BITS}")));
    }
    let m = 1usize << bits;
    if m.saturating_mul(dim) > QPE_MAX_CELLS {
        return Err(Error::GuardExceeded(format!("2^{bits} × {dim} amplitudes exceed {QPE_MAX_CELLS}")));
    }
    // powers[c][k] = (U^k ψ₀)_c
    let mut powers = vec![vec![C64::new(0.0, 0.0); m]; dim];
    let mut v = psi0.clone();
    for k in 0..m {
        for (c, x) in v.iter().enumerate() {
            powers[c][k] = *x;
        }
        if k + 1 < m {
            v = u * v;
        }
    }
    let fft = FftPlanner::new().plan_fft_forward(m);
    let mut distribution = vec![0.0; m];
    let scale = 1.0 / m as f64;
    for row in powers.iter_mut() {
        fft.process(row);
        for (x, a) in row.iter().enumerate() {
            distribution[x] += (a * scale).norm_sqr();
        }
    }
    Ok(QPEOutcome { bits, distribution })
}

/// `‖U_AB v − v‖` for `v = w/‖w‖`, without forming `U_AB`.
pub fn fixed_point_residual(instance: &PEInstance, w: &CVector) -> Result<f64> {
    let (inner, outside) = instance.compress(w)?;
    let norm = (inner.norm_squared() + outside * outside).sqrt();
    if norm == 0.0 {
        return Err(Error::InvalidWeights("zero vector".into()));
    }
    let moved = instance.pa().reflect(&instance.pb().reflect(&inner));
    Ok((moved - inner).norm() / norm)
}

/// `‖(I − 2Π) − Π_g (I − 2Π_g)‖∞`, where `Π` projects onto the span of all
/// groups together. Zero exactly when the groups span mutually orthogonal
/// subspaces. Written with `I − 2Π` because a product of `k` reflections
/// `2Π_g − I` over orthogonal pieces equals `(−1)^{k−1}(2Π − I)`.
pub fn reflection_factorization_residual(dim: usize, groups: &[Vec<CVector>], tol: &TolerancePolicy) -> Result<f64> {
    let all: Vec<CVector> = groups.iter().flatten().cloned().collect();
    let whole = Projector::from_orthonormal(dim, &orthonormalize(&all, tol)?);
    let mut product = CMatrix::identity(dim, dim);
    for g in groups.iter().rev() {
        let p = Projector::from_orthonormal(dim, &orthonormalize(g, tol)?);
        product = -p.reflect_matrix(&product);
    }
    let target = -whole.reflect_matrix(&CMatrix::identity(dim, dim));
    Ok(max_abs(&(target - product)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FactorizationReport {
    pub residual_a: f64,
    pub residual_b: f64,
}

impl FactorizationReport {
    pub fn max(&self) -> f64 {
        self.residual_a.max(self.residual_b)
    }
}

/// Factorization of both reflections over the instance's generator families
/// (`•, even, ■ | →, odd, ←, ★` for loop composition, `•, ■ | ♦, ★` for the
/// simple loop).
pub fn verify_reflection_factorization(instance: &PEInstance) -> Result<FactorizationReport> {
    let side = |s: Side| -> Result<f64> {
        let groups: Vec<Vec<CVector>> =
            instance.groups().iter().filter(|g| g.side == s).map(|g| instance.group_generators(&g.name)).collect();
        reflection_factorization_residual(instance.active_dim(), &groups, instance.tolerance())
    };
    Ok(FactorizationReport { residual_a: side(Side::A)?, residual_b: side(Side::B)? })
}
