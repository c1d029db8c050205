//! Second moments of the quartic oscillator as power series in λ.
//!
//! Each λ^k coefficient is a single monomial `c · X^(k+1) · m^a · ω₀^b`
//! with rational `c`, where `X` is the action `I` on the classical side and
//! `ħ` on the quantum side. Keeping `c` rational makes the quantization
//! bridge an exact comparison.

use num_rational::Rational64;

use super::QuarticOscillator;
use crate::error::{Error, Result};
use crate::types::PerturbationSeries;

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn to_f64(c: Rational64) -> f64 {
    *c.numer() as f64 / *c.denom() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymbolicTerm {
    pub coefficient: Rational64,
    /// Power of `I` (classical) or `ħ` (quantum).
    pub scale_power: u32,
    pub mass_power: i32,
    pub omega_power: i32,
}

impl SymbolicTerm {
    pub fn eval(&self, scale: f64, mass: f64, omega0: f64) -> f64 {
        to_f64(self.coefficient)
            * scale.powi(self.scale_power as i32)
            * mass.powi(self.mass_power)
            * omega0.powi(self.omega_power)
    }

    fn same_monomial(&self, other: &Self) -> bool {
        self.scale_power == other.scale_power
            && self.mass_power == other.mass_power
            && self.omega_power == other.omega_power
    }
}

/// Coefficient `k` multiplies `λ^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicSeries {
    terms: Vec<SymbolicTerm>,
}

impl SymbolicSeries {
    pub fn new(terms: Vec<SymbolicTerm>) -> Self {
        assert!(!terms.is_empty(), "series needs at least one term");
        Self { terms }
    }

    pub fn terms(&self) -> &[SymbolicTerm] {
        &self.terms
    }

    pub fn order(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn rational_coefficients(&self) -> Vec<Rational64> {
        self.terms.iter().map(|t| t.coefficient).collect()
    }

    pub fn evaluate(&self, scale: f64, mass: f64, omega0: f64) -> PerturbationSeries {
        PerturbationSeries::new(
            self.terms
                .iter()
                .map(|t| t.eval(scale, mass, omega0))
                .collect(),
        )
    }

    /// Cauchy product truncated at the lower order. `None` when the terms
    /// collected into one order are different monomials.
    pub fn product_truncated(&self, other: &Self) -> Option<Self> {
        let order = self.order().min(other.order());
        let mut terms = Vec::with_capacity(order + 1);
        for k in 0..=order {
            let mut acc: Option<SymbolicTerm> = None;
            for j in 0..=k {
                let (a, b) = (self.terms[j], other.terms[k - j]);
                let t = SymbolicTerm {
                    coefficient: a.coefficient * b.coefficient,
                    scale_power: a.scale_power + b.scale_power,
                    mass_power: a.mass_power + b.mass_power,
                    omega_power: a.omega_power + b.omega_power,
                };
                acc = match acc {
                    None => Some(t),
                    Some(prev) if prev.same_monomial(&t) => Some(SymbolicTerm {
                        coefficient: prev.coefficient + t.coefficient,
                        ..prev
                    }),
                    Some(_) => return None,
                };
            }
            terms.push(acc.expect("at least one product per order"));
        }
        Some(Self { terms })
    }
}

/// `⟨q²⟩`, `⟨(qp + pq)/2⟩` and `⟨p²⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondMoments<T> {
    pub qq: T,
    pub qp: T,
    pub pp: T,
}

impl<T> SecondMoments<T> {
    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> SecondMoments<U> {
        SecondMoments {
            qq: f(&self.qq),
            qp: f(&self.qp),
            pp: f(&self.pp),
        }
    }

    pub fn try_map<U>(&self, mut f: impl FnMut(&T) -> Result<U>) -> Result<SecondMoments<U>> {
        Ok(SecondMoments {
            qq: f(&self.qq)?,
            qp: f(&self.qp)?,
            pp: f(&self.pp)?,
        })
    }

    /// `[("q2", qq), ("qp", qp), ("p2", pp)]`.
    pub fn named(&self) -> [(&'static str, &T); 3] {
        [("q2", &self.qq), ("qp", &self.qp), ("p2", &self.pp)]
    }
}

pub type CovarianceSeries = SecondMoments<SymbolicSeries>;

// λ^k coefficients scale as X^(k+1) m^(-2k) ω^(-3k) times m^-1 ω^-1 for q²,
// m ω for p² and nothing for qp.
fn build(coeffs: [Rational64; 3], mass_shift: i32, omega_shift: i32) -> SymbolicSeries {
    SymbolicSeries::new(
        coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| SymbolicTerm {
                coefficient: c,
                scale_power: k as u32 + 1,
                mass_power: mass_shift - 2 * k as i32,
                omega_power: omega_shift - 3 * k as i32,
            })
            .collect(),
    )
}

fn zero() -> [Rational64; 3] {
    [r(0, 1); 3]
}

/// Classical torus averages at action `I`, to order λ².
pub fn classical_covariance_symbolic() -> CovarianceSeries {
    SecondMoments {
        qq: build([r(1, 1), r(-1, 8), r(85, 2304)], -1, -1),
        qp: build(zero(), 0, 0),
        pp: build([r(1, 1), r(1, 8), r(-17, 768)], 1, 1),
    }
}

/// Ground-state expectation values, to order λ².
pub fn quantum_covariance_symbolic() -> CovarianceSeries {
    SecondMoments {
        qq: build([r(1, 2), r(-1, 16), r(35, 1536)], -1, -1),
        qp: build(zero(), 0, 0),
        pp: build([r(1, 2), r(1, 16), r(-7, 512)], 1, 1),
    }
}

pub fn classical_covariance_series(
    osc: &QuarticOscillator,
    action: f64,
) -> Result<SecondMoments<PerturbationSeries>> {
    if !(action > 0.0 && action.is_finite()) {
        return Err(Error::InvalidAction {
            index: 0,
            value: action,
        });
    }
    Ok(classical_covariance_symbolic().map(|s| s.evaluate(action, osc.mass(), osc.omega0())))
}

pub fn quantum_covariance_series(
    osc: &QuarticOscillator,
    hbar: f64,
) -> Result<SecondMoments<PerturbationSeries>> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::NonPositiveHbar(hbar));
    }
    Ok(quantum_covariance_symbolic().map(|s| s.evaluate(hbar, osc.mass(), osc.omega0())))
}

/// Replacement `I^k → c_k ħ^k` for each power of the action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizationRules {
    factors: Vec<(u32, Rational64)>,
}

impl QuantizationRules {
    /// `I → ħ/2`, `I² → ħ²/2`, `I³ → 21ħ³/34`.
    pub fn ground_state() -> Self {
        Self {
            factors: vec![(1, r(1, 2)), (2, r(1, 2)), (3, r(21, 34))],
        }
    }

    /// `I → ħ/2` applied to every power, i.e. `I^k → ħ^k/2^k`.
    pub fn naive() -> Self {
        Self {
            factors: vec![(1, r(1, 2)), (2, r(1, 4)), (3, r(1, 8))],
        }
    }

    pub fn factor(&self, power: u32) -> Option<Rational64> {
        self.factors
            .iter()
            .find(|(p, _)| *p == power)
            .map(|(_, c)| *c)
    }

    pub fn entries(&self) -> &[(u32, Rational64)] {
        &self.factors
    }
}

impl Default for QuantizationRules {
    fn default() -> Self {
        Self::ground_state()
    }
}

/// Term-by-term substitution of the action powers. The result is a series
/// in ħ whose numeric value follows from [`SymbolicSeries::evaluate`].
pub fn apply_quantization(
    series: &SymbolicSeries,
    rules: &QuantizationRules,
) -> Result<SymbolicSeries> {
    let terms = series
        .terms()
        .iter()
        .map(|t| {
            let c = rules.factor(t.scale_power).ok_or(Error::UnsupportedPower {
                power: t.scale_power as usize,
            })?;
            Ok(SymbolicTerm {
                coefficient: t.coefficient * c,
                ..*t
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SymbolicSeries::new(terms))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Classical,
    Quantum,
}

/// `⟨q²⟩⟨p²⟩` as an exact series. First moments vanish on both sides, so
/// this is `(Δq)²(Δp)²`.
pub fn variance_product_symbolic(side: Side) -> SymbolicSeries {
    let m = match side {
        Side::Classical => classical_covariance_symbolic(),
        Side::Quantum => quantum_covariance_symbolic(),
    };
    m.qq.product_truncated(&m.pp)
        .expect("q² and p² coefficients combine into single monomials")
}

/// `scale` is `I` for the classical side and `ħ` for the quantum side.
pub fn variance_product_series(
    side: Side,
    osc: &QuarticOscillator,
    scale: f64,
) -> Result<PerturbationSeries> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(match side {
            Side::Classical => Error::InvalidAction {
                index: 0,
                value: scale,
            },
            Side::Quantum => Error::NonPositiveHbar(scale),
        });
    }
    Ok(variance_product_symbolic(side).evaluate(scale, osc.mass(), osc.omega0()))
}
