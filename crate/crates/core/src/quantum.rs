//! Closed-form Gaussian ground-state quantities, used as oracles for the
//! classical analogs.
//!
//! The ground-state covariance of a linear system is the classical
//! normal-form covariance with every action set to `ħ/2`. Purity is
//! `(ħ/2)^n / √det σ` and the entropy sums the kernel over the symplectic
//! eigenvalues of `σ/ħ`.

use nalgebra::DMatrix;

use crate::analogs::{covariance_determinant, entropy_kernel, SINGULAR_DET};
use crate::covariance::covariance_normal_form;
use crate::error::{Error, Result};
use crate::symplectic::{symplectic_form, williamson_eigenvalues};
use crate::types::{CovarianceMatrix, NormalModeSystem, SymplecticSpectrum, TorusSpec};

/// Reduced Planck constant in the caller's action units.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct HBar(f64);

impl HBar {
    pub fn new(value: f64) -> Result<Self> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::NonPositiveHbar(value));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for HBar {
    fn default() -> Self {
        Self(1.0)
    }
}

pub fn quantum_gaussian_covariance(sys: &NormalModeSystem, hbar: HBar) -> Result<CovarianceMatrix> {
    let torus = TorusSpec::uniform(sys.n_dof(), hbar.value() / 2.0)?;
    covariance_normal_form(sys, &torus)
}

pub fn quantum_purity(cov_sub: &CovarianceMatrix, hbar: HBar) -> Result<f64> {
    let det = covariance_determinant(cov_sub);
    if !det.is_finite() || det < SINGULAR_DET {
        return Err(Error::SingularCovariance(det));
    }
    Ok((hbar.value() / 2.0).powi(cov_sub.n_modes() as i32) / det.sqrt())
}

/// Symplectic eigenvalues of `σ/ħ`.
pub fn quantum_spectrum(cov_sub: &CovarianceMatrix, hbar: HBar) -> Result<SymplecticSpectrum> {
    williamson_eigenvalues(&cov_sub.scaled(1.0 / hbar.value()))
}

pub fn quantum_entropy(cov_sub: &CovarianceMatrix, hbar: HBar) -> Result<f64> {
    quantum_spectrum(cov_sub, hbar)?
        .values()
        .iter()
        .map(|&nu| entropy_kernel(nu))
        .sum()
}

/// `(1/ħ)√(σ_pp σ_qq − σ_qp²)` for a single-mode covariance.
pub fn single_mode_symplectic_eigenvalue(cov: &CovarianceMatrix, hbar: HBar) -> Result<f64> {
    if cov.dim() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "expected a 2x2 covariance, got {}",
            cov.dim()
        )));
    }
    let m = cov.matrix();
    let d = m[(1, 1)] * m[(0, 0)] - m[(0, 1)] * m[(0, 1)];
    Ok(d.max(0.0).sqrt() / hbar.value())
}

/// Phase-space block of the quantum metric:
/// `g_qq = σ_pp/ħ²`, `g_pp = σ_qq/ħ²`, `g_qp = −σ_pq/ħ²`.
pub fn metric_from_covariance(cov: &CovarianceMatrix, hbar: HBar) -> DMatrix<f64> {
    metric_from_matrix(cov.matrix(), hbar)
}

pub fn metric_from_matrix(m: &DMatrix<f64>, hbar: HBar) -> DMatrix<f64> {
    let n = m.nrows() / 2;
    let inv = 1.0 / (hbar.value() * hbar.value());
    DMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let (rq, cq) = (r < n, c < n);
        // swap the q and p roles of both indices
        let rr = if rq { r + n } else { r - n };
        let cc = if cq { c + n } else { c - n };
        let sign = if rq == cq { 1.0 } else { -1.0 };
        sign * m[(rr, cc)] * inv
    })
}

/// `F = −Ω/ħ²`.
pub fn berry_curvature_phase_space(n: usize, hbar: HBar) -> DMatrix<f64> {
    -symplectic_form(n).into_matrix() / (hbar.value() * hbar.value())
}
