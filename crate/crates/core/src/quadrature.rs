//! Torus averages `⟨f⟩ = (2π)^-N ∫ f(φ, I) d^Nφ` with the uniform angle
//! measure.
//!
//! The tensor-trapezoid rule on `M` equispaced nodes per angle integrates
//! any trigonometric polynomial of per-angle degree below `M` exactly, so
//! the second moments of linear models are exact up to round-off.
//!
//! Grid points are visited in lexicographic order of the angle indices
//! (last angle fastest). Work is split by the index of the first angle and
//! the partial sums are merged in that order, so results do not depend on
//! the number of threads.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::par;
use crate::types::{QuadratureConfig, QuadratureMethod, TorusSpec};

/// Real function on the angle torus at fixed actions.
///
/// Implementations must be 2π-periodic in every angle and callable from
/// several threads at once.
pub trait TorusFunction: Sync {
    fn arity(&self) -> usize;
    fn eval(&self, angles: &[f64], torus: &TorusSpec) -> f64;
}

/// Adapts a closure into a [`TorusFunction`].
pub struct FnTorus<F> {
    arity: usize,
    f: F,
}

impl<F> FnTorus<F>
where
    F: Fn(&[f64], &TorusSpec) -> f64 + Sync,
{
    pub fn new(arity: usize, f: F) -> Self {
        Self { arity, f }
    }
}

impl<F> TorusFunction for FnTorus<F>
where
    F: Fn(&[f64], &TorusSpec) -> f64 + Sync,
{
    fn arity(&self) -> usize {
        self.arity
    }

    fn eval(&self, angles: &[f64], torus: &TorusSpec) -> f64 {
        (self.f)(angles, torus)
    }
}

/// Monte Carlo sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
}

/// Samples per independent random stream.
const MC_CHUNK: usize = 4096;

/// Average of a single function over the torus.
pub fn classical_average(
    f: &dyn TorusFunction,
    torus: &TorusSpec,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    Ok(classical_average_batch(&[f], torus, cfg)?[0])
}

/// Averages of several functions from one sweep over the grid.
pub fn classical_average_batch(
    fs: &[&dyn TorusFunction],
    torus: &TorusSpec,
    cfg: &QuadratureConfig,
) -> Result<Vec<f64>> {
    for f in fs {
        check_arity(f.arity(), torus)?;
    }
    average_vector(torus, cfg, fs.len(), |angles, out| {
        for (slot, f) in out.iter_mut().zip(fs) {
            *slot = f.eval(angles, torus);
        }
    })
}

/// Averages of a vector-valued integrand. `eval(angles, out)` fills `out`
/// (length `width`) at one torus point.
pub fn average_vector<F>(
    torus: &TorusSpec,
    cfg: &QuadratureConfig,
    width: usize,
    eval: F,
) -> Result<Vec<f64>>
where
    F: Fn(&[f64], &mut [f64]) + Sync + Send,
{
    cfg.validate()?;
    match cfg.method {
        QuadratureMethod::TensorTrapezoid => Ok(trapezoid_sums(
            torus.len(),
            cfg.nodes_per_angle,
            width,
            &eval,
        )),
        QuadratureMethod::MonteCarlo => Ok(monte_carlo_moments(torus.len(), cfg, width, &eval)
            .into_iter()
            .map(|e| e.mean)
            .collect()),
    }
}

/// Monte Carlo averages with standard errors, regardless of `cfg.method`.
pub fn monte_carlo_batch(
    fs: &[&dyn TorusFunction],
    torus: &TorusSpec,
    cfg: &QuadratureConfig,
) -> Result<Vec<McEstimate>> {
    cfg.validate()?;
    for f in fs {
        check_arity(f.arity(), torus)?;
    }
    Ok(monte_carlo_moments(
        torus.len(),
        cfg,
        fs.len(),
        &|angles: &[f64], out: &mut [f64]| {
            for (slot, f) in out.iter_mut().zip(fs) {
                *slot = f.eval(angles, torus);
            }
        },
    ))
}

/// Largest `|f(φ) − f(φ + 2π e_a)|` over `probes` random angle vectors.
pub fn periodicity_defect(
    f: &dyn TorusFunction,
    torus: &TorusSpec,
    probes: usize,
    seed: u64,
) -> f64 {
    let n = f.arity();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    let mut angles = vec![0.0; n];
    for _ in 0..probes {
        for a in angles.iter_mut() {
            *a = rng.random::<f64>() * TAU;
        }
        let base = f.eval(&angles, torus);
        for a in 0..n {
            let mut shifted = angles.clone();
            shifted[a] += TAU;
            worst = worst.max((f.eval(&shifted, torus) - base).abs());
        }
    }
    worst
}

fn check_arity(arity: usize, torus: &TorusSpec) -> Result<()> {
    if arity != torus.len() {
        return Err(Error::ArityMismatch {
            function: arity,
            torus: torus.len(),
        });
    }
    Ok(())
}

fn trapezoid_sums<F>(n_angles: usize, m: usize, width: usize, eval: &F) -> Vec<f64>
where
    F: Fn(&[f64], &mut [f64]) + Sync + Send,
{
    let nodes: Vec<f64> = (0..m).map(|j| TAU * j as f64 / m as f64).collect();
    if n_angles == 0 {
        let mut out = vec![0.0; width];
        eval(&[], &mut out);
        return out;
    }
    let inner_points = m.pow(n_angles as u32 - 1);
    let partials = par::map_indices(m, |lead| {
        let mut acc = vec![CompensatedSum::new(); width];
        let mut angles = vec![0.0; n_angles];
        let mut idx = vec![0usize; n_angles];
        let mut out = vec![0.0; width];
        idx[0] = lead;
        for _ in 0..inner_points {
            for (a, &i) in angles.iter_mut().zip(&idx) {
                *a = nodes[i];
            }
            eval(&angles, &mut out);
            for (s, &v) in acc.iter_mut().zip(&out) {
                s.add(v);
            }
            // odometer over the trailing indices, last fastest
            for pos in (1..n_angles).rev() {
                idx[pos] += 1;
                if idx[pos] < m {
                    break;
                }
                idx[pos] = 0;
            }
        }
        acc
    });
    let total = (m as f64).powi(n_angles as i32);
    let mut sums = vec![CompensatedSum::new(); width];
    for part in &partials {
        for (s, p) in sums.iter_mut().zip(part) {
            s.merge(p);
        }
    }
    sums.iter().map(|s| s.value() / total).collect()
}

fn monte_carlo_moments<F>(
    n_angles: usize,
    cfg: &QuadratureConfig,
    width: usize,
    eval: &F,
) -> Vec<McEstimate>
where
    F: Fn(&[f64], &mut [f64]) + Sync + Send,
{
    let samples = cfg.mc_samples;
    let chunks = samples.div_ceil(MC_CHUNK);
    let partials = par::map_indices(chunks, |chunk| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
        rng.set_stream(chunk as u64);
        let count = MC_CHUNK.min(samples - chunk * MC_CHUNK);
        let mut sum = vec![CompensatedSum::new(); width];
        let mut sum_sq = vec![CompensatedSum::new(); width];
        let mut angles = vec![0.0; n_angles];
        let mut out = vec![0.0; width];
        for _ in 0..count {
            for a in angles.iter_mut() {
                *a = rng.random::<f64>() * TAU;
            }
            eval(&angles, &mut out);
            for k in 0..width {
                sum[k].add(out[k]);
                sum_sq[k].add(out[k] * out[k]);
            }
        }
        (sum, sum_sq)
    });
    let n = samples as f64;
    (0..width)
        .map(|k| {
            let mut s = CompensatedSum::new();
            let mut s2 = CompensatedSum::new();
            for (sum, sum_sq) in &partials {
                s.merge(&sum[k]);
                s2.merge(&sum_sq[k]);
            }
            let mean = s.value() / n;
            let var = if samples > 1 {
                ((s2.value() - n * mean * mean) / (n - 1.0)).max(0.0)
            } else {
                0.0
            };
            McEstimate {
                mean,
                std_error: (var / n).sqrt(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn torus(n: usize) -> TorusSpec {
        TorusSpec::uniform(n, 1.0).unwrap()
    }

    #[test]
    fn constant_averages_to_one() {
        let one = FnTorus::new(2, |_: &[f64], _: &TorusSpec| 1.0);
        let v = classical_average(&one, &torus(2), &QuadratureConfig::default()).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sin_squared_on_eight_nodes() {
        let f = FnTorus::new(1, |a: &[f64], _: &TorusSpec| a[0].sin().powi(2));
        let v = classical_average(&f, &torus(1), &QuadratureConfig::trapezoid(8)).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn batch_of_constant_and_odd() {
        let one = FnTorus::new(1, |_: &[f64], _: &TorusSpec| 1.0);
        let odd = FnTorus::new(1, |a: &[f64], _: &TorusSpec| a[0].sin());
        let v = classical_average_batch(&[&one, &odd], &torus(1), &QuadratureConfig::default())
            .unwrap();
        assert!((v[0] - 1.0).abs() < 1e-15);
        assert!(v[1].abs() < 1e-15);
    }

    #[test]
    fn arity_mismatch_is_reported() {
        let f = FnTorus::new(2, |_: &[f64], _: &TorusSpec| 1.0);
        let err = classical_average(&f, &torus(3), &QuadratureConfig::default()).unwrap_err();
        assert_eq!(
            err,
            Error::ArityMismatch {
                function: 2,
                torus: 3
            }
        );
    }

    #[test]
    fn monte_carlo_within_three_standard_errors() {
        let f = FnTorus::new(1, |a: &[f64], _: &TorusSpec| a[0].sin().powi(2));
        let cfg = QuadratureConfig::monte_carlo(1_000_000, 17);
        let est = monte_carlo_batch(&[&f], &torus(1), &cfg).unwrap()[0];
        assert!((est.mean - 0.5).abs() < 3.0 * est.std_error, "{est:?}");
        // sin² has variance 1/8
        assert!((est.std_error - (0.125f64 / 1e6).sqrt()).abs() < 1e-5);
    }

    #[test]
    fn monte_carlo_is_reproducible() {
        let f = FnTorus::new(2, |a: &[f64], _: &TorusSpec| {
            (a[0] - a[1]).cos() + a[0].sin()
        });
        let cfg = QuadratureConfig::monte_carlo(10_001, 99);
        let a = classical_average(&f, &torus(2), &cfg).unwrap();
        let b = classical_average(&f, &torus(2), &cfg).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn periodic_function_has_small_defect() {
        let f = FnTorus::new(3, |a: &[f64], _: &TorusSpec| {
            (a[0] + 2.0 * a[1]).sin() * a[2].cos()
        });
        assert!(periodicity_defect(&f, &torus(3), 20, 3) < 1e-12);
        let bad = FnTorus::new(1, |a: &[f64], _: &TorusSpec| a[0]);
        assert!(periodicity_defect(&bad, &torus(1), 5, 3) > 1.0);
    }
}
