//! Quartic anharmonic oscillator `H = p²/2m + mω₀²q²/2 + λq⁴/24`.
//!
//! [`series`] holds the second-moment perturbation series in λ (exact
//! rational coefficients) and the action-power quantization bridge between
//! the classical and quantum versions. [`oracle`] computes the same torus
//! averages numerically as time averages along one closed orbit.

pub mod gauss;
pub mod ode;
pub mod oracle;
pub mod series;

use crate::error::{Error, Result};

pub use oracle::{
    action_from_energy, energy_for_action, fit_oracle, orbit_averages_by_quadrature,
    time_average_oracle, turning_point, verify_lambdas, OracleFit, OracleRow, OrbitAverages,
};
pub use series::{
    apply_quantization, classical_covariance_series, classical_covariance_symbolic,
    quantum_covariance_series, quantum_covariance_symbolic, variance_product_series,
    variance_product_symbolic, CovarianceSeries, QuantizationRules, SecondMoments, Side,
    SymbolicSeries, SymbolicTerm,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticOscillator {
    mass: f64,
    omega0: f64,
    lambda: f64,
}

impl QuarticOscillator {
    pub fn new(mass: f64, omega0: f64, lambda: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::ParameterRegionViolation(format!(
                "mass {mass} must be positive"
            )));
        }
        if !(omega0 > 0.0 && omega0.is_finite()) {
            return Err(Error::ParameterRegionViolation(format!(
                "frequency {omega0} must be positive"
            )));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::ParameterRegionViolation(format!(
                "coupling {lambda} must be non-negative"
            )));
        }
        Ok(Self {
            mass,
            omega0,
            lambda,
        })
    }

    /// `m = ω₀ = 1`.
    pub fn unit(lambda: f64) -> Result<Self> {
        Self::new(1.0, 1.0, lambda)
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.mass, self.omega0, lambda)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn potential(&self, q: f64) -> f64 {
        let q2 = q * q;
        0.5 * self.mass * self.omega0 * self.omega0 * q2 + self.lambda * q2 * q2 / 24.0
    }

    pub fn force(&self, q: f64) -> f64 {
        -(self.mass * self.omega0 * self.omega0 * q + self.lambda * q * q * q / 6.0)
    }

    pub fn energy(&self, q: f64, p: f64) -> f64 {
        p * p / (2.0 * self.mass) + self.potential(q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(QuarticOscillator::new(0.0, 1.0, 0.0).is_err());
        assert!(QuarticOscillator::new(1.0, -1.0, 0.0).is_err());
        assert!(QuarticOscillator::new(1.0, 1.0, -1e-3).is_err());
        assert!(QuarticOscillator::new(1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn force_is_minus_potential_gradient() {
        let osc = QuarticOscillator::new(1.3, 0.8, 0.4).unwrap();
        let q = 0.7;
        let h = 1e-5;
        let numeric = -(osc.potential(q + h) - osc.potential(q - h)) / (2.0 * h);
        assert!((numeric - osc.force(q)).abs() < 1e-9);
        assert_eq!(osc.energy(0.0, 2.0), 2.0 / 1.3);
    }
}
