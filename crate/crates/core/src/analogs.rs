//! Classical analogs of purity, linear entropy and von Neumann entropy.
//!
//! `μ^cl = ∏ I_{a_k} / √det σ^cl_(n)`. The tilde quantities set every
//! action to a common constant `β`; the constant cancels, which
//! [`report`] re-checks in debug builds by evaluating a second time at
//! `β = 2.5`.

use nalgebra::DMatrix;

use crate::covariance::{covariance_normal_form, subsystem_covariance};
use crate::error::{Error, Result};
use crate::symplectic::scaled_spectrum;
use crate::types::{
    CovarianceMatrix, NormalModeSystem, SubsystemSelector, SymplecticSpectrum, TorusSpec,
};

/// Determinants below this (or non-finite) count as singular.
pub const SINGULAR_DET: f64 = 1e-300;
/// Eigenvalues this far below ½ are snapped to ½ before the kernel.
pub const HALF_CLAMP: f64 = 1e-8;
/// Default uniform action.
pub const DEFAULT_BETA: f64 = 1.0;
/// Second uniform action used by the debug-build cancellation check.
pub const CHECK_BETA: f64 = 2.5;

/// `𝒮(σ) = (σ + ½) ln(σ + ½) − (σ − ½) ln(σ − ½)`, in nats.
pub fn entropy_kernel(sigma: f64) -> Result<f64> {
    if !sigma.is_finite() || sigma < 0.5 - HALF_CLAMP {
        return Err(Error::EigenvalueBelowHalf(sigma));
    }
    let s = sigma.max(0.5);
    let upper = s + 0.5;
    let lower = s - 0.5;
    let lower_term = if lower > 0.0 { lower * lower.ln() } else { 0.0 };
    Ok(upper * upper.ln() - lower_term)
}

/// Determinant from a Cholesky factorization, falling back to
/// fully pivoted LU when the matrix is not numerically positive definite.
pub fn covariance_determinant(cov: &CovarianceMatrix) -> f64 {
    determinant(cov.matrix())
}

fn determinant(m: &DMatrix<f64>) -> f64 {
    match m.clone().cholesky() {
        Some(chol) => chol.l_dirty().diagonal().iter().map(|d| d * d).product(),
        None => m.clone().full_piv_lu().determinant(),
    }
}

fn nonsingular_det(cov: &CovarianceMatrix) -> Result<f64> {
    let det = covariance_determinant(cov);
    if !det.is_finite() || det < SINGULAR_DET {
        return Err(Error::SingularCovariance(det));
    }
    Ok(det)
}

/// `μ^cl = ∏ I / √det σ`. Values above 1 can occur for arbitrary
/// non-uniform actions; see [`purity_exceeds_unity`].
pub fn classical_purity(cov_sub: &CovarianceMatrix, actions: &TorusSpec) -> Result<f64> {
    if actions.len() != cov_sub.n_modes() {
        return Err(Error::DimensionMismatch(format!(
            "{} actions for a {}-mode covariance",
            actions.len(),
            cov_sub.n_modes()
        )));
    }
    let det = nonsingular_det(cov_sub)?;
    let prod: f64 = actions.actions().iter().product();
    Ok(prod / det.sqrt())
}

/// True when a purity lies above 1 by more than round-off.
pub fn purity_exceeds_unity(purity: f64) -> bool {
    purity > 1.0 + 1e-10
}

/// `μ^cl` of a subsystem at the given (possibly non-uniform) actions.
pub fn classical_purity_at(
    sys: &NormalModeSystem,
    sel: &SubsystemSelector,
    torus: &TorusSpec,
) -> Result<f64> {
    let cov = covariance_normal_form(sys, torus)?;
    let sub = subsystem_covariance(&cov, sel)?;
    classical_purity(&sub, &torus.restrict(sel)?)
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::NonPositiveBeta(beta));
    }
    Ok(())
}

fn uniform_subsystem(
    sys: &NormalModeSystem,
    sel: &SubsystemSelector,
    beta: f64,
) -> Result<(CovarianceMatrix, TorusSpec)> {
    check_beta(beta)?;
    sel.check_range(sys.n_dof())?;
    let torus = TorusSpec::uniform(sys.n_dof(), beta)?;
    let cov = covariance_normal_form(sys, &torus)?;
    Ok((subsystem_covariance(&cov, sel)?, torus.restrict(sel)?))
}

/// `μ̃^cl` at uniform action `β`.
pub fn classical_purity_tilde(
    sys: &NormalModeSystem,
    sel: &SubsystemSelector,
    beta: f64,
) -> Result<f64> {
    let (sub, actions) = uniform_subsystem(sys, sel, beta)?;
    classical_purity(&sub, &actions)
}

/// `S̃^cl_L = 1 − μ̃^cl`.
pub fn linear_entropy_tilde(
    sys: &NormalModeSystem,
    sel: &SubsystemSelector,
    beta: f64,
) -> Result<f64> {
    Ok(1.0 - classical_purity_tilde(sys, sel, beta)?)
}

/// Scaled spectrum `σ̃_k` of a subsystem.
pub fn scaled_spectrum_tilde(
    sys: &NormalModeSystem,
    sel: &SubsystemSelector,
    beta: f64,
) -> Result<SymplecticSpectrum> {
    let (sub, actions) = uniform_subsystem(sys, sel, beta)?;
    scaled_spectrum(&sub, &actions)
}

/// `Σ_k 𝒮(σ_k)` over a spectrum.
pub fn spectrum_entropy(spectrum: &SymplecticSpectrum) -> Result<f64> {
    spectrum.values().iter().map(|&s| entropy_kernel(s)).sum()
}

/// `S̃^cl = Σ 𝒮(σ̃_k)`.
pub fn von_neumann_tilde(
    sys: &NormalModeSystem,
    sel: &SubsystemSelector,
    beta: f64,
) -> Result<f64> {
    spectrum_entropy(&scaled_spectrum_tilde(sys, sel, beta)?)
}

/// All tilde quantities of one subsystem.
#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementReport {
    pub selector: SubsystemSelector,
    pub purity: f64,
    pub linear_entropy: f64,
    pub von_neumann: f64,
    pub spectrum: SymplecticSpectrum,
    pub beta_used: f64,
    /// `|μ̃ − 2^-n ∏ σ̃_k^-1|`, recomputed for every report.
    pub spectral_identity_residual: f64,
}

/// Tolerance of the purity/spectrum identity check in [`report`].
pub const SPECTRAL_IDENTITY_TOL: f64 = 1e-10;

pub fn report(
    sys: &NormalModeSystem,
    sel: &SubsystemSelector,
    beta: f64,
) -> Result<EntanglementReport> {
    let rep = report_unchecked(sys, sel, beta)?;
    #[cfg(debug_assertions)]
    if beta != CHECK_BETA {
        let other = report_unchecked(sys, sel, CHECK_BETA)?;
        debug_assert!(
            (other.purity - rep.purity).abs() <= 1e-9 * rep.purity.max(1.0)
                && (other.von_neumann - rep.von_neumann).abs() <= 1e-9 * rep.von_neumann.max(1.0),
            "tilde quantities depend on the action constant: {rep:?} vs {other:?}"
        );
    }
    Ok(rep)
}

fn report_unchecked(
    sys: &NormalModeSystem,
    sel: &SubsystemSelector,
    beta: f64,
) -> Result<EntanglementReport> {
    let (sub, actions) = uniform_subsystem(sys, sel, beta)?;
    let purity = classical_purity(&sub, &actions)?;
    let spectrum = scaled_spectrum(&sub, &actions)?;
    let von_neumann = spectrum_entropy(&spectrum)?;
    let from_spectrum = spectrum.values().iter().map(|s| 0.5 / s).product::<f64>();
    let residual = (purity - from_spectrum).abs();
    if !(residual <= SPECTRAL_IDENTITY_TOL * purity.max(1.0)) {
        return Err(Error::InconsistentSpectrum(residual));
    }
    Ok(EntanglementReport {
        selector: sel.clone(),
        purity,
        linear_entropy: 1.0 - purity,
        von_neumann,
        spectrum,
        beta_used: beta,
        spectral_identity_residual: residual,
    })
}

/// Reports for every nonempty subsystem, in display order.
pub fn report_all(sys: &NormalModeSystem, beta: f64) -> Result<Vec<EntanglementReport>> {
    SubsystemSelector::all_subsets(sys.n_dof())
        .iter()
        .map(|sel| report(sys, sel, beta))
        .collect()
}
