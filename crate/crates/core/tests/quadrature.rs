use std::f64::consts::PI;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use torus_entropy::covariance::{covariance_by_quadrature, covariance_normal_form};
use torus_entropy::models::{
    sample_three_oscillator, sample_two_oscillator, three_oscillator_system, two_oscillator_system,
};
use torus_entropy::quadrature::{classical_average_batch, monte_carlo_batch};
use torus_entropy::{classical_average, FnTorus, QuadratureConfig, TorusSpec};

#[test]
fn sixteen_node_grid_reproduces_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cfg = QuadratureConfig::trapezoid(16);
    for _ in 0..5 {
        let sys = three_oscillator_system(&sample_three_oscillator(&mut rng)).unwrap();
        let torus = TorusSpec::new(vec![0.4, 1.3, 0.9]).unwrap();
        let quad = covariance_by_quadrature(&sys, &torus, &cfg).unwrap();
        let exact = covariance_normal_form(&sys, &torus).unwrap();
        assert!(quad.max_abs_diff(&exact) < 1e-10);

        let pair = two_oscillator_system(&sample_two_oscillator(&mut rng)).unwrap();
        let torus = TorusSpec::uniform(2, 1.7).unwrap();
        let quad = covariance_by_quadrature(&pair, &torus, &cfg).unwrap();
        assert!(quad.max_abs_diff(&covariance_normal_form(&pair, &torus).unwrap()) < 1e-10);
    }
}

#[test]
fn grid_is_exact_once_it_resolves_the_harmonics() {
    // cos(3φ1)cos(2φ2)² has harmonics up to 3; four nodes alias, eight do not
    let f = FnTorus::new(2, |a: &[f64], _: &TorusSpec| {
        (3.0 * a[0]).cos().powi(2) * (2.0 * a[1]).cos().powi(2)
    });
    let torus = TorusSpec::uniform(2, 1.0).unwrap();
    let coarse = classical_average(&f, &torus, &QuadratureConfig::trapezoid(4)).unwrap();
    let fine = classical_average(&f, &torus, &QuadratureConfig::trapezoid(8)).unwrap();
    let finer = classical_average(&f, &torus, &QuadratureConfig::trapezoid(32)).unwrap();
    assert!((fine - 0.25).abs() < 1e-15);
    assert!((finer - 0.25).abs() < 1e-15);
    assert!((coarse - 0.25).abs() > 0.1);
}

#[test]
fn smooth_non_polynomial_converges_fast() {
    // ⟨exp(cos φ)⟩ = I0(1)
    let i0 = 1.266_065_877_752_008_4;
    let f = FnTorus::new(1, |a: &[f64], _: &TorusSpec| a[0].cos().exp());
    let torus = TorusSpec::uniform(1, 1.0).unwrap();
    let v = classical_average(&f, &torus, &QuadratureConfig::trapezoid(16)).unwrap();
    assert!((v - i0).abs() < 1e-14);
}

#[test]
fn monte_carlo_error_bars_cover_the_truth() {
    let f = FnTorus::new(3, |a: &[f64], t: &TorusSpec| {
        t.actions()[0] * a[0].sin().powi(2) + a[1].cos() * a[2].sin()
    });
    let torus = TorusSpec::uniform(3, 2.0).unwrap();
    let est =
        monte_carlo_batch(&[&f], &torus, &QuadratureConfig::monte_carlo(200_000, 3)).unwrap()[0];
    assert!((est.mean - 1.0).abs() < 5.0 * est.std_error, "{est:?}");
    assert!(est.std_error < 5e-3);
    let again =
        monte_carlo_batch(&[&f], &torus, &QuadratureConfig::monte_carlo(200_000, 3)).unwrap()[0];
    assert_eq!(est, again);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn averaging_is_linear(a in -3.0..3.0f64, b in -3.0..3.0f64, shift in 0.0..(2.0 * PI), m in 3usize..12) {
        let torus = TorusSpec::uniform(2, 1.0).unwrap();
        let cfg = QuadratureConfig::trapezoid(m);
        let f = FnTorus::new(2, move |x: &[f64], _: &TorusSpec| (x[0] + shift).sin().exp() * x[1].cos());
        let g = FnTorus::new(2, |x: &[f64], _: &TorusSpec| (x[0] - x[1]).cos().powi(2));
        let h = FnTorus::new(2, move |x: &[f64], _: &TorusSpec| {
            a * (x[0] + shift).sin().exp() * x[1].cos() + b * (x[0] - x[1]).cos().powi(2)
        });
        let v = classical_average_batch(&[&f, &g, &h], &torus, &cfg).unwrap();
        prop_assert!((v[2] - (a * v[0] + b * v[1])).abs() < 1e-13);
    }

    #[test]
    fn shifting_the_grid_origin_changes_nothing_for_resolved_functions(shift in 0.0..(2.0 * PI)) {
        let torus = TorusSpec::uniform(1, 1.0).unwrap();
        let f = FnTorus::new(1, move |x: &[f64], _: &TorusSpec| (x[0] + shift).sin().powi(4));
        let v = classical_average(&f, &torus, &QuadratureConfig::trapezoid(16)).unwrap();
        prop_assert!((v - 0.375).abs() < 1e-14);
    }
}
