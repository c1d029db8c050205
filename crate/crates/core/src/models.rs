//! The two worked linear models and their closed-form reference values.
//!
//! * Three oscillators on a ring-like chain with springs `k` (to the
//!   origin), `k12` (neighbours) and `k13` (ends).
//! * Two oscillators with Hamiltonian `½(p1² + p2² + A q1² + B q2² + C q1 q2)`.

use nalgebra::DMatrix;
use rand::Rng;

use crate::analogs::entropy_kernel;
use crate::error::{Error, Result};
use crate::types::{NormalModeSystem, SubsystemSelector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeOscillatorParams {
    pub k: f64,
    pub k12: f64,
    pub k13: f64,
}

impl ThreeOscillatorParams {
    pub fn validate(&self) -> Result<()> {
        let Self { k, k12, k13 } = *self;
        if ![k, k12, k13].iter().all(|x| x.is_finite()) {
            return Err(Error::ParameterRegionViolation(
                "non-finite spring constant".into(),
            ));
        }
        if !(k > 0.0) {
            return Err(Error::ParameterRegionViolation(format!(
                "k = {k} must be positive"
            )));
        }
        if !(k + 3.0 * k12 > 0.0) {
            return Err(Error::ParameterRegionViolation(format!(
                "k + 3 k12 = {} must be positive",
                k + 3.0 * k12
            )));
        }
        if !(k + k12 + 2.0 * k13 > 0.0) {
            return Err(Error::ParameterRegionViolation(format!(
                "k + k12 + 2 k13 = {} must be positive",
                k + k12 + 2.0 * k13
            )));
        }
        Ok(())
    }

    /// Normal frequencies `(√k, √(k + 3k12), √(k + k12 + 2k13))`.
    pub fn frequencies(&self) -> Result<[f64; 3]> {
        self.validate()?;
        Ok([
            self.k.sqrt(),
            (self.k + 3.0 * self.k12).sqrt(),
            (self.k + self.k12 + 2.0 * self.k13).sqrt(),
        ])
    }
}

/// The orthogonal matrix `S` (`Q = S q`) that diagonalizes the three-oscillator
/// Hamiltonian for every choice of spring constants.
pub fn three_oscillator_transform() -> DMatrix<f64> {
    let r3 = 1.0 / 3f64.sqrt();
    let r6 = 1.0 / 6f64.sqrt();
    let r2 = 1.0 / 2f64.sqrt();
    DMatrix::from_row_slice(
        3,
        3,
        &[r3, r3, r3, r6, -(2.0f64 / 3.0).sqrt(), r6, -r2, 0.0, r2],
    )
}

pub fn three_oscillator_system(params: &ThreeOscillatorParams) -> Result<NormalModeSystem> {
    let w = params.frequencies()?;
    NormalModeSystem::new(w.to_vec(), three_oscillator_transform(), "three_oscillator")
}

/// Three-oscillator system specified directly by its normal frequencies.
pub fn three_oscillator_from_frequencies(w: [f64; 3]) -> Result<NormalModeSystem> {
    NormalModeSystem::new(w.to_vec(), three_oscillator_transform(), "three_oscillator")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoOscillatorParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl TwoOscillatorParams {
    /// Requires `A, B > 0`, `A ≠ B` and `4AB − C² > 0`. The boundary
    /// `4AB = C²` makes one normal frequency vanish and is rejected.
    pub fn validate(&self) -> Result<()> {
        let Self { a, b, c } = *self;
        if ![a, b, c].iter().all(|x| x.is_finite()) {
            return Err(Error::ParameterRegionViolation(
                "non-finite coupling".into(),
            ));
        }
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::ParameterRegionViolation(format!(
                "A = {a}, B = {b} must be positive"
            )));
        }
        if a == b {
            return Err(Error::ParameterRegionViolation("A = B is excluded".into()));
        }
        if !(4.0 * a * b - c * c > 0.0) {
            return Err(Error::ParameterRegionViolation(format!(
                "4AB − C² = {} must be positive",
                4.0 * a * b - c * c
            )));
        }
        Ok(())
    }

    /// `α ∈ (−π/4, π/4)` with `tan 2α = C/(B − A)`.
    pub fn rotation_angle(&self) -> Result<f64> {
        self.validate()?;
        Ok(0.5 * (self.c / (self.b - self.a)).atan())
    }

    /// `ω1 = √(A − (C/2) tan α)`, `ω2 = √(B + (C/2) tan α)`.
    pub fn frequencies(&self) -> Result<[f64; 2]> {
        let t = self.rotation_angle()?.tan();
        let w1sq = self.a - 0.5 * self.c * t;
        let w2sq = self.b + 0.5 * self.c * t;
        if !(w1sq > 0.0 && w2sq > 0.0) {
            return Err(Error::ParameterRegionViolation(format!(
                "normal frequencies squared ({w1sq}, {w2sq}) must be positive"
            )));
        }
        Ok([w1sq.sqrt(), w2sq.sqrt()])
    }
}

/// `R(α) = [[cos α, −sin α], [sin α, cos α]]` plays the role of `S`.
pub fn two_oscillator_system(params: &TwoOscillatorParams) -> Result<NormalModeSystem> {
    let alpha = params.rotation_angle()?;
    let w = params.frequencies()?;
    let (s, c) = alpha.sin_cos();
    let r = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
    NormalModeSystem::new(w.to_vec(), r, "two_oscillator")
}

/// Which of the two distinct nontrivial classes a three-oscillator subsystem
/// falls in. Subsystems `(1), (3), (1,2), (2,3)` share values, as do
/// `(2), (1,3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ThreeClass {
    Outer,
    Middle,
    Full,
}

fn three_class(sel: &SubsystemSelector) -> Result<ThreeClass> {
    sel.check_range(3)?;
    Ok(match sel.indices() {
        [1] | [3] | [1, 2] | [2, 3] => ThreeClass::Outer,
        [2] | [1, 3] => ThreeClass::Middle,
        _ => ThreeClass::Full,
    })
}

fn check_three(w: &[f64]) -> Result<[f64; 3]> {
    match w {
        [a, b, c] if [*a, *b, *c].iter().all(|x| *x > 0.0 && x.is_finite()) => Ok([*a, *b, *c]),
        [_, _, _] => Err(Error::NonPositiveFrequency {
            index: w
                .iter()
                .position(|x| !(*x > 0.0 && x.is_finite()))
                .unwrap_or(0),
            value: w
                .iter()
                .copied()
                .find(|x| !(*x > 0.0 && x.is_finite()))
                .unwrap_or(f64::NAN),
        }),
        _ => Err(Error::DimensionMismatch(format!(
            "expected 3 frequencies, got {}",
            w.len()
        ))),
    }
}

/// Scaled symplectic eigenvalue of particle (1) alone:
/// `(1/12)√((2/ω1 + 1/ω2 + 3/ω3)(2ω1 + ω2 + 3ω3))`.
pub fn outer_scaled_eigenvalue(w: [f64; 3]) -> f64 {
    let [w1, w2, w3] = w;
    ((2.0 / w1 + 1.0 / w2 + 3.0 / w3) * (2.0 * w1 + w2 + 3.0 * w3)).sqrt() / 12.0
}

/// Scaled symplectic eigenvalue of particle (2) alone:
/// `(1/6)√(5 + 2ω1/ω2 + 2ω2/ω1)`.
pub fn middle_scaled_eigenvalue(w: [f64; 3]) -> f64 {
    let [w1, w2, _] = w;
    (5.0 + 2.0 * w1 / w2 + 2.0 * w2 / w1).sqrt() / 6.0
}

/// Closed-form purity of a three-oscillator subsystem at uniform actions.
pub fn reference_purity_3osc(sel: &SubsystemSelector, w: &[f64]) -> Result<f64> {
    let [w1, w2, w3] = check_three(w)?;
    Ok(match three_class(sel)? {
        ThreeClass::Outer => {
            6.0 * (w1 * w2 * w3
                / ((2.0 * w1 + w2 + 3.0 * w3) * (w1 * (3.0 * w2 + w3) + 2.0 * w2 * w3)))
                .sqrt()
        }
        ThreeClass::Middle => 3.0 * (w1 * w2 / ((w2 + 2.0 * w1) * (w1 + 2.0 * w2))).sqrt(),
        ThreeClass::Full => 1.0,
    })
}

/// Closed-form von Neumann analog of a three-oscillator subsystem, via the
/// scaled eigenvalues and the entropy kernel.
pub fn reference_entropy_3osc(sel: &SubsystemSelector, w: &[f64]) -> Result<f64> {
    let w = check_three(w)?;
    match three_class(sel)? {
        ThreeClass::Outer => entropy_kernel(outer_scaled_eigenvalue(w)),
        ThreeClass::Middle => entropy_kernel(middle_scaled_eigenvalue(w)),
        ThreeClass::Full => Ok(0.0),
    }
}

/// The arctanh/log form of the outer-particle entropy. Singular in form
/// (though not in value) when `ω1 = ω2 = ω3`; returns `None` there.
pub fn expanded_entropy_3osc_outer(w: [f64; 3]) -> Option<f64> {
    let [w1, w2, w3] = w;
    let y = (2.0 / w1 + 1.0 / w2 + 3.0 / w3) * (2.0 * w1 + w2 + 3.0 * w3);
    let bracket = 2.0 * w3 * (w1 * w1 - 11.0 * w1 * w2 + w2 * w2)
        + 3.0 * w3 * w3 * (w1 + 2.0 * w2)
        + 3.0 * w1 * w2 * (2.0 * w1 + w2);
    if bracket == 0.0 || y <= 36.0 {
        return None;
    }
    // log{bracket^6 / (8916100448256 (ω1ω2ω3)^6)} taken in log space
    let log_term = 6.0 * bracket.abs().ln() - 8_916_100_448_256f64.ln() - 6.0 * (w1 * w2 * w3).ln();
    let v = (log_term + 2.0 * y.sqrt() * (6.0 / y.sqrt()).atanh()) / 12.0;
    v.is_finite().then_some(v)
}

/// The arctanh/log form of the middle-particle entropy; `None` at `ω1 = ω2`.
pub fn expanded_entropy_3osc_middle(w: [f64; 3]) -> Option<f64> {
    let [w1, w2, _] = w;
    if w1 == w2 {
        return None;
    }
    let x = 2.0 * w1 / w2 + 2.0 * w2 / w1 + 5.0;
    let v = (2.0 * x.sqrt() * (3.0 / x.sqrt()).atanh()
        - 3.0 * (18.0 * w1 * w2 / ((w1 - w2) * (w1 - w2))).ln())
        / 6.0;
    v.is_finite().then_some(v)
}

fn two_class_is_full(sel: &SubsystemSelector) -> Result<bool> {
    sel.check_range(2)?;
    Ok(sel.len() == 2)
}

/// Scaled eigenvalue of either single particle,
/// `σ̃² = 1/4 + C²/(8D(A + B + D))` with `D = √(4AB − C²)`.
pub fn pair_scaled_eigenvalue(params: &TwoOscillatorParams) -> Result<f64> {
    params.validate()?;
    let TwoOscillatorParams { a, b, c } = *params;
    let d = (4.0 * a * b - c * c).sqrt();
    Ok((0.25 + c * c / (8.0 * d * (a + b + d))).sqrt())
}

/// `1/(2σ̃)` for one particle, 1 for the pair.
pub fn reference_purity_2osc(sel: &SubsystemSelector, params: &TwoOscillatorParams) -> Result<f64> {
    params.validate()?;
    if two_class_is_full(sel)? {
        return Ok(1.0);
    }
    Ok(0.5 / pair_scaled_eigenvalue(params)?)
}

/// `√((4AB − C²)/(4AB))`. This is the reduced purity of a Gaussian whose
/// exponent matrix is the potential matrix itself rather than its square
/// root, so it does not describe the ground state; kept for comparison.
pub fn unrooted_purity_2osc(params: &TwoOscillatorParams) -> Result<f64> {
    params.validate()?;
    let TwoOscillatorParams { a, b, c } = *params;
    Ok(((4.0 * a * b - c * c) / (4.0 * a * b)).sqrt())
}

/// `√(AB/(4AB − C²))`, companion of [`unrooted_purity_2osc`].
pub fn unrooted_scaled_eigenvalue_2osc(params: &TwoOscillatorParams) -> Result<f64> {
    params.validate()?;
    let TwoOscillatorParams { a, b, c } = *params;
    Ok((a * b / (4.0 * a * b - c * c)).sqrt())
}

/// Trigonometric form in the rotation angle and normal frequencies.
pub fn trig_purity_2osc(params: &TwoOscillatorParams) -> Result<f64> {
    let alpha = params.rotation_angle()?;
    let [w1, w2] = params.frequencies()?;
    let (s2, c2) = (alpha.sin().powi(2), alpha.cos().powi(2));
    Ok((w1 * w2 / ((w1 * s2 + w2 * c2) * (w1 * c2 + w2 * s2))).sqrt())
}

pub fn reference_entropy_2osc(
    sel: &SubsystemSelector,
    params: &TwoOscillatorParams,
) -> Result<f64> {
    params.validate()?;
    if two_class_is_full(sel)? {
        return Ok(0.0);
    }
    entropy_kernel(pair_scaled_eigenvalue(params)?)
}

/// Draws spring constants with `k ∈ [0.5, 3]`, `k12, k13 ∈ [−0.1, 2]`,
/// resampling until the admissible region is hit.
pub fn sample_three_oscillator<R: Rng + ?Sized>(rng: &mut R) -> ThreeOscillatorParams {
    loop {
        let p = ThreeOscillatorParams {
            k: rng.random_range(0.5..=3.0),
            k12: rng.random_range(-0.1..=2.0),
            k13: rng.random_range(-0.1..=2.0),
        };
        if p.validate().is_ok() {
            return p;
        }
    }
}

/// Draws `A, B ∈ [0.5, 3]` with `|A − B| > 0.05` and `C² ≤ 0.95·4AB`.
pub fn sample_two_oscillator<R: Rng + ?Sized>(rng: &mut R) -> TwoOscillatorParams {
    loop {
        let a: f64 = rng.random_range(0.5..=3.0);
        let b: f64 = rng.random_range(0.5..=3.0);
        if (a - b).abs() <= 0.05 {
            continue;
        }
        let c_max = (0.95 * 4.0 * a * b).sqrt();
        let c = rng.random_range(-c_max..=c_max);
        let p = TwoOscillatorParams { a, b, c };
        if p.validate().is_ok() {
            return p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_8;

    fn sel(ix: &[usize]) -> SubsystemSelector {
        SubsystemSelector::new(ix.to_vec()).unwrap()
    }

    #[test]
    fn three_oscillator_frequencies() {
        let sys = three_oscillator_system(&ThreeOscillatorParams {
            k: 1.0,
            k12: 0.0,
            k13: 0.0,
        })
        .unwrap();
        assert_eq!(sys.frequencies(), &[1.0, 1.0, 1.0]);
        let sys = three_oscillator_system(&ThreeOscillatorParams {
            k: 1.0,
            k12: 1.0,
            k13: 0.0,
        })
        .unwrap();
        assert_eq!(sys.frequencies(), &[1.0, 2.0, 2f64.sqrt()]);
        let err = three_oscillator_system(&ThreeOscillatorParams {
            k: 1.0,
            k12: -0.4,
            k13: 0.0,
        })
        .unwrap_err();
        assert!(matches!(err, Error::ParameterRegionViolation(_)));
    }

    #[test]
    fn transform_diagonalizes_the_potential() {
        // independent check: S K Sᵀ must be diag(ω²)
        let p = ThreeOscillatorParams {
            k: 1.4,
            k12: 0.6,
            k13: -0.05,
        };
        let (k, k12, k13) = (p.k, p.k12, p.k13);
        let pot = DMatrix::from_row_slice(
            3,
            3,
            &[
                k + k12 + k13,
                -k12,
                -k13,
                -k12,
                k + 2.0 * k12,
                -k12,
                -k13,
                -k12,
                k + k12 + k13,
            ],
        );
        let s = three_oscillator_transform();
        let d = &s * pot * s.transpose();
        let w = p.frequencies().unwrap();
        for r in 0..3 {
            for c in 0..3 {
                let want = if r == c { w[r] * w[r] } else { 0.0 };
                assert!((d[(r, c)] - want).abs() < 1e-14, "{d}");
            }
        }
    }

    #[test]
    fn pair_frequencies_and_rotation() {
        let p = TwoOscillatorParams {
            a: 2.0,
            b: 1.0,
            c: 0.0,
        };
        assert_eq!(p.rotation_angle().unwrap(), 0.0);
        assert_eq!(p.frequencies().unwrap(), [2f64.sqrt(), 1.0]);

        let p = TwoOscillatorParams {
            a: 2.0,
            b: 1.0,
            c: 1.0,
        };
        assert!((p.rotation_angle().unwrap() + FRAC_PI_8).abs() < 1e-15);
        let t = FRAC_PI_8.tan();
        let w = p.frequencies().unwrap();
        assert!((w[0] - (2.0 + 0.5 * t).sqrt()).abs() < 1e-15);
        assert!((w[1] - (1.0 - 0.5 * t).sqrt()).abs() < 1e-15);

        // R K Rᵀ diagonal
        let sys = two_oscillator_system(&p).unwrap();
        let pot = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let d = sys.transform() * pot * sys.transform().transpose();
        assert!(d[(0, 1)].abs() < 1e-15);
        assert!((d[(0, 0)] - w[0] * w[0]).abs() < 1e-14);
        assert!((d[(1, 1)] - w[1] * w[1]).abs() < 1e-14);

        let err = two_oscillator_system(&TwoOscillatorParams {
            a: 1.0,
            b: 1.0,
            c: 0.3,
        })
        .unwrap_err();
        assert!(matches!(err, Error::ParameterRegionViolation(_)));
    }

    #[test]
    fn three_oscillator_reference_purities() {
        let w = [1.0, 2.0, 2f64.sqrt()];
        let want = 6.0
            * (w[0] * w[1] * w[2]
                / ((2.0 * w[0] + w[1] + 3.0 * w[2])
                    * (w[0] * (3.0 * w[1] + w[2]) + 2.0 * w[1] * w[2])))
                .sqrt();
        assert_eq!(reference_purity_3osc(&sel(&[1]), &w).unwrap(), want);
        assert!(
            (reference_purity_3osc(&sel(&[2]), &w).unwrap() - 3.0 * (2.0f64 / 20.0).sqrt()).abs()
                < 1e-15
        );
        assert!(
            (reference_purity_3osc(&sel(&[2]), &w).unwrap() - 0.948_683_298_050_513_8).abs()
                < 1e-12
        );
        assert_eq!(reference_purity_3osc(&sel(&[1, 2, 3]), &w).unwrap(), 1.0);
        assert_eq!(
            reference_purity_3osc(&sel(&[1, 3]), &w).unwrap(),
            reference_purity_3osc(&sel(&[2]), &w).unwrap()
        );
    }

    #[test]
    fn three_oscillator_reference_entropies() {
        assert!(
            reference_entropy_3osc(&sel(&[1]), &[1.3, 1.3, 1.3])
                .unwrap()
                .abs()
                < 1e-12
        );
        assert!(
            reference_entropy_3osc(&sel(&[2]), &[0.7, 0.7, 2.0])
                .unwrap()
                .abs()
                < 1e-12
        );
        let w = [1.0, 2.0, 2f64.sqrt()];
        let sigma = 10f64.sqrt() / 6.0;
        let want = (sigma + 0.5) * (sigma + 0.5).ln() - (sigma - 0.5) * (sigma - 0.5).ln();
        assert!((reference_entropy_3osc(&sel(&[2]), &w).unwrap() - want).abs() < 1e-15);
        assert_eq!(reference_entropy_3osc(&sel(&[1, 2, 3]), &w).unwrap(), 0.0);
    }

    #[test]
    fn expanded_forms_agree_with_kernel_route() {
        for w in [
            [1.0, 2.0, 2f64.sqrt()],
            [0.8, 1.7, 1.1],
            [2.5, 0.9, 1.3],
            [1.0, 1.0, 3.0],
        ] {
            let outer = reference_entropy_3osc(&sel(&[1]), &w).unwrap();
            let expanded = expanded_entropy_3osc_outer(w).unwrap();
            assert!(
                (outer - expanded).abs() < 1e-9,
                "{w:?}: {outer} vs {expanded}"
            );
            if w[0] != w[1] {
                let mid = reference_entropy_3osc(&sel(&[2]), &w).unwrap();
                let expanded = expanded_entropy_3osc_middle(w).unwrap();
                assert!((mid - expanded).abs() < 1e-9, "{w:?}: {mid} vs {expanded}");
            }
        }
        assert!(expanded_entropy_3osc_middle([1.0, 1.0, 2.0]).is_none());
        assert!(expanded_entropy_3osc_outer([1.0, 1.0, 1.0]).is_none());
    }

    #[test]
    fn pair_reference_values() {
        let p = TwoOscillatorParams {
            a: 2.0,
            b: 1.0,
            c: 1.0,
        };
        let pur = reference_purity_2osc(&sel(&[1]), &p).unwrap();
        assert!((pur - 0.983_672_109_883_890_3).abs() < 1e-15);
        assert!((pur - trig_purity_2osc(&p).unwrap()).abs() < 1e-15);
        assert_eq!(reference_purity_2osc(&sel(&[1, 2]), &p).unwrap(), 1.0);
        let uncoupled = TwoOscillatorParams {
            a: 2.0,
            b: 1.0,
            c: 0.0,
        };
        assert_eq!(reference_purity_2osc(&sel(&[2]), &uncoupled).unwrap(), 1.0);
        assert!(
            reference_entropy_2osc(&sel(&[1]), &uncoupled)
                .unwrap()
                .abs()
                < 1e-15
        );
        assert_eq!(reference_entropy_2osc(&sel(&[1, 2]), &p).unwrap(), 0.0);
        assert!((pair_scaled_eigenvalue(&p).unwrap() - 0.508_299_457_691_261_1).abs() < 1e-15);
        assert!(
            (reference_entropy_2osc(&sel(&[1]), &p).unwrap() - 0.048_101_195_166_033_09).abs()
                < 1e-14
        );
    }

    #[test]
    fn unrooted_form_is_a_different_quantity() {
        let p = TwoOscillatorParams {
            a: 2.0,
            b: 1.0,
            c: 1.0,
        };
        assert!((unrooted_purity_2osc(&p).unwrap() - (7.0f64 / 8.0).sqrt()).abs() < 1e-15);
        assert!(
            (unrooted_scaled_eigenvalue_2osc(&p).unwrap() - (2.0f64 / 7.0).sqrt()).abs() < 1e-15
        );
        let gap = trig_purity_2osc(&p).unwrap() - unrooted_purity_2osc(&p).unwrap();
        assert!(gap > 0.04, "{gap}");
        // both agree when uncoupled
        let q = TwoOscillatorParams {
            a: 2.0,
            b: 1.0,
            c: 0.0,
        };
        assert_eq!(
            unrooted_purity_2osc(&q).unwrap(),
            trig_purity_2osc(&q).unwrap()
        );
    }

    #[test]
    fn closed_form_matches_trig_form() {
        for (a, b, c) in [(2.5, 0.7, -1.1), (0.6, 2.9, 2.5), (1.0, 1.5, 0.01)] {
            let p = TwoOscillatorParams { a, b, c };
            let closed = reference_purity_2osc(&sel(&[2]), &p).unwrap();
            assert!((closed - trig_purity_2osc(&p).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn samplers_stay_in_region() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let p = sample_three_oscillator(&mut rng);
            assert!(p.validate().is_ok());
            let q = sample_two_oscillator(&mut rng);
            assert!(q.validate().is_ok() && (q.a - q.b).abs() > 0.05);
            assert!(q.c * q.c <= 0.95 * 4.0 * q.a * q.b);
        }
    }
}
