//! Numerical torus averages for the quartic oscillator.
//!
//! For one degree of freedom the angle advances uniformly in time, so the
//! torus average equals the time average over one period. The action is
//! fixed by inverting `I(E) = (1/2π)∮p dq`, then Hamilton's equations are
//! integrated from the right turning point until `p` changes sign from `+`
//! to `−` again.

use std::f64::consts::{FRAC_PI_2, PI};

use super::gauss::GaussLegendre;
use super::ode::{gbs_step, next_step, GbsConfig};
use super::series::classical_covariance_series;
use super::QuarticOscillator;
use crate::error::{Error, Result};
use crate::numeric::{log_log_slope, polyfit};
use crate::par;

const COARSE_NODES: usize = 32;
const FINE_NODES: usize = 64;
/// Allowed gap between the coarse and fine action integrals, relative.
const ACTION_QUAD_TOL: f64 = 1e-13;
/// Required `|I(E) − I|` after inversion.
pub const ACTION_TOL: f64 = 1e-12;
pub const DRIFT_TOL: f64 = 1e-10;
pub const CLOSURE_TOL: f64 = 1e-8;
const MAX_BRACKET_DOUBLINGS: usize = 64;

/// Right turning point `a` with `V(a) = E`.
pub fn turning_point(osc: &QuarticOscillator, energy: f64) -> Result<f64> {
    if !(energy > 0.0 && energy.is_finite()) {
        return Err(Error::NoTurningPoint(energy));
    }
    let half_k = 0.5 * osc.mass() * osc.omega0() * osc.omega0();
    // root of (λ/24)x² + (k/2)x − E in the stable form
    let x = 2.0 * energy / (half_k + (half_k * half_k + osc.lambda() * energy / 6.0).sqrt());
    Ok(x.sqrt())
}

// With q = a sinθ, E − V(q) = a² cos²θ · g(θ).
fn g(osc: &QuarticOscillator, a: f64, theta: f64) -> f64 {
    let s2 = theta.sin().powi(2);
    0.5 * osc.mass() * osc.omega0() * osc.omega0() + osc.lambda() * a * a * (1.0 + s2) / 24.0
}

fn action_with(osc: &QuarticOscillator, a: f64, rule: &GaussLegendre) -> f64 {
    let two_m = 2.0 * osc.mass();
    // even integrand: twice the half range
    2.0 / PI
        * rule.integrate(0.0, FRAC_PI_2, |t| {
            a * a * t.cos().powi(2) * (two_m * g(osc, a, t)).sqrt()
        })
}

pub fn action_from_energy(osc: &QuarticOscillator, energy: f64) -> Result<f64> {
    let a = turning_point(osc, energy)?;
    let coarse = action_with(osc, a, &GaussLegendre::new(COARSE_NODES));
    let fine = action_with(osc, a, &GaussLegendre::new(FINE_NODES));
    if !fine.is_finite() || (fine - coarse).abs() > ACTION_QUAD_TOL * fine.abs().max(1.0) {
        return Err(Error::QuadratureFailure(format!(
            "action integral unresolved: {coarse} vs {fine}"
        )));
    }
    Ok(fine)
}

/// `E` with `I(E) = action`, by bisection to the resolution of `f64`.
pub fn energy_for_action(osc: &QuarticOscillator, action: f64) -> Result<f64> {
    if !(action > 0.0 && action.is_finite()) {
        return Err(Error::InvalidAction {
            index: 0,
            value: action,
        });
    }
    let rule = GaussLegendre::new(FINE_NODES);
    let eval = |e: f64| -> Result<f64> { Ok(action_with(osc, turning_point(osc, e)?, &rule)) };
    let mut lo = 0.0;
    let mut hi = 2.0 * osc.omega0() * action * (1.0 + osc.lambda());
    let mut doublings = 0;
    while eval(hi)? < action {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_BRACKET_DOUBLINGS || !hi.is_finite() {
            return Err(Error::RootBracketFailure(action));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if eval(mid)? < action {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let energy = 0.5 * (lo + hi);
    let got = action_from_energy(osc, energy)?;
    if (got - action).abs() >= ACTION_TOL {
        return Err(Error::RootBracketFailure(action));
    }
    Ok(energy)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitAverages {
    pub energy: f64,
    pub period: f64,
    pub q2: f64,
    pub p2: f64,
    pub qp: f64,
    /// Largest `|H − E|/E` seen at accepted steps.
    pub energy_drift: f64,
    /// `|q(T) − a|` at the detected period.
    pub closure: f64,
}

/// Time averages of `q²`, `p²` and `qp` over one orbit at action `action`.
pub fn time_average_oracle(osc: &QuarticOscillator, action: f64) -> Result<OrbitAverages> {
    time_average_oracle_with(osc, action, &GbsConfig::default())
}

pub fn time_average_oracle_with(
    osc: &QuarticOscillator,
    action: f64,
    cfg: &GbsConfig,
) -> Result<OrbitAverages> {
    let energy = energy_for_action(osc, action)?;
    let a = turning_point(osc, energy)?;
    let m = osc.mass();
    // state: q, p, ∫q², ∫p², ∫qp
    let rhs = |y: &[f64; 5]| {
        [
            y[1] / m,
            osc.force(y[0]),
            y[0] * y[0],
            y[1] * y[1],
            y[0] * y[1],
        ]
    };
    let drift = |y: &[f64; 5]| (osc.energy(y[0], y[1]) - energy).abs() / energy;

    let harmonic_period = 2.0 * PI / osc.omega0();
    let mut y = [a, 0.0, 0.0, 0.0, 0.0];
    let mut t = 0.0;
    let mut h = harmonic_period / 32.0;
    let mut max_drift = 0.0_f64;
    for _ in 0..cfg.max_steps {
        let outcome = gbs_step(&rhs, &y, h, cfg);
        if !outcome.accepted() {
            h = next_step(h, &outcome);
            continue;
        }
        let next = outcome.state;
        if y[1] > 0.0 && next[1] <= 0.0 {
            let (tau, end) = locate_crossing(&rhs, &y, next, h, cfg);
            let period = t + tau;
            max_drift = max_drift.max(drift(&end));
            let closure = (end[0] - a).abs();
            if closure > CLOSURE_TOL * a.max(1.0) {
                return Err(Error::PeriodNotFound(format!("q(T) − a = {closure:.3e}")));
            }
            if max_drift >= DRIFT_TOL {
                return Err(Error::EnergyDriftExceeded(max_drift));
            }
            return Ok(OrbitAverages {
                energy,
                period,
                q2: end[2] / period,
                p2: end[3] / period,
                qp: end[4] / period,
                energy_drift: max_drift,
                closure,
            });
        }
        y = next;
        t += h;
        max_drift = max_drift.max(drift(&y));
        if t > 4.0 * harmonic_period {
            return Err(Error::PeriodNotFound(format!(
                "no return to the turning point by t = {t}"
            )));
        }
        h = next_step(h, &outcome);
    }
    Err(Error::PeriodNotFound(format!(
        "step limit {} reached",
        cfg.max_steps
    )))
}

/// Root of `p` inside the step `[0, h]` by the Illinois variant of regula
/// falsi, each trial point being a fresh extrapolated step from `y`.
fn locate_crossing(
    rhs: &impl Fn(&[f64; 5]) -> [f64; 5],
    y: &[f64; 5],
    end: [f64; 5],
    h: f64,
    cfg: &GbsConfig,
) -> (f64, [f64; 5]) {
    let (mut a, mut fa) = (0.0, y[1]);
    let (mut b, mut fb, mut best) = (h, end[1], end);
    if fb == 0.0 {
        return (b, best);
    }
    for _ in 0..100 {
        let c = b - fb * (b - a) / (fb - fa);
        if !(c > a.min(b) && c < a.max(b)) {
            break;
        }
        let state = gbs_step(rhs, y, c, cfg).state;
        let fc = state[1];
        if fc * fb < 0.0 {
            a = b;
            fa = fb;
        } else {
            fa *= 0.5;
        }
        b = c;
        fb = fc;
        best = state;
        if fc == 0.0 || (b - a).abs() <= 4.0 * f64::EPSILON * b.abs() {
            break;
        }
    }
    (b, best)
}

/// The same averages as a quadrature over the orbit. With `q = a sinθ`,
/// `dt = m dq/p = dθ · m/√(2m g(θ))`, which is smooth in θ.
pub fn orbit_averages_by_quadrature(osc: &QuarticOscillator, action: f64) -> Result<OrbitAverages> {
    let energy = energy_for_action(osc, action)?;
    let a = turning_point(osc, energy)?;
    let m = osc.mass();
    let rule = GaussLegendre::new(FINE_NODES);
    let dt = |t: f64| m / (2.0 * m * g(osc, a, t)).sqrt();
    let half_period = 2.0 * rule.integrate(0.0, FRAC_PI_2, dt);
    let q2_time = 2.0 * rule.integrate(0.0, FRAC_PI_2, |t| (a * t.sin()).powi(2) * dt(t));
    let period = 2.0 * half_period;
    Ok(OrbitAverages {
        energy,
        period,
        q2: q2_time / half_period,
        p2: 2.0 * PI * m * action / period,
        qp: 0.0,
        energy_drift: 0.0,
        closure: 0.0,
    })
}

/// Oracle result next to the series prediction of `⟨q²⟩` for one λ.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleRow {
    pub lambda: f64,
    pub series: Result<f64>,
    pub oracle: Result<OrbitAverages>,
}

impl OracleRow {
    /// `oracle − series` for `⟨q²⟩`.
    pub fn residual(&self) -> Option<f64> {
        match (&self.series, &self.oracle) {
            (Ok(s), Ok(o)) => Some(o.q2 - s),
            _ => None,
        }
    }

    pub fn error(&self) -> Option<&Error> {
        self.series.as_ref().err().or(self.oracle.as_ref().err())
    }
}

/// Runs the oracle at each λ (in parallel when enabled); `base` supplies
/// the mass and frequency. Rows come back in input order.
pub fn verify_lambdas(base: &QuarticOscillator, action: f64, lambdas: &[f64]) -> Vec<OracleRow> {
    par::map_slice(lambdas, |&lambda| {
        let osc = base.with_lambda(lambda);
        let series = osc
            .as_ref()
            .map_err(Clone::clone)
            .and_then(|o| Ok(classical_covariance_series(o, action)?.qq.eval(lambda)));
        let oracle = osc
            .map_err(|e| e.clone())
            .and_then(|o| time_average_oracle(&o, action));
        OracleRow {
            lambda,
            series,
            oracle,
        }
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleFit {
    /// Quadratic least-squares coefficients, constant term first.
    pub coefficients: Vec<f64>,
    /// `|c1 − expected|/|expected|`.
    pub linear_relative_error: f64,
    /// Log-log slope of `|residual|` against λ over the positive λ.
    pub residual_slope: Option<f64>,
}

/// Fits the oracle `⟨q²⟩` values and compares the linear coefficient with
/// `expected_linear`. Rows with errors are skipped.
pub fn fit_oracle(rows: &[OracleRow], expected_linear: f64) -> Option<OracleFit> {
    let ok: Vec<(f64, f64, f64)> = rows
        .iter()
        .filter_map(|r| Some((r.lambda, r.oracle.as_ref().ok()?.q2, r.residual()?)))
        .collect();
    let xs: Vec<f64> = ok.iter().map(|r| r.0).collect();
    let ys: Vec<f64> = ok.iter().map(|r| r.1).collect();
    let coefficients = polyfit(&xs, &ys, 2)?;
    let residuals: Vec<f64> = ok.iter().map(|r| r.2).collect();
    Some(OracleFit {
        linear_relative_error: ((coefficients[1] - expected_linear) / expected_linear).abs(),
        coefficients,
        residual_slope: log_log_slope(&xs, &residuals),
    })
}
