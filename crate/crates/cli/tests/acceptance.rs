//! End-to-end acceptance checks. Prints one line per criterion and exits
//! non-zero if any criterion fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torus_entropy::analogs::report;
use torus_entropy::anharmonic::{
    apply_quantization, classical_covariance_symbolic, fit_oracle, quantum_covariance_symbolic,
    verify_lambdas, QuantizationRules, QuarticOscillator,
};
use torus_entropy::models::{
    reference_purity_2osc, sample_three_oscillator, sample_two_oscillator, three_oscillator_system,
    two_oscillator_system, unrooted_purity_2osc,
};
use torus_entropy::quantum::{quantum_entropy, quantum_gaussian_covariance, quantum_purity};
use torus_entropy::symplectic::{symplectic_form, williamson_eigenvalues};
use torus_entropy::{
    covariance_by_quadrature, covariance_normal_form, subsystem_covariance, CovarianceMatrix, HBar,
    QuadratureConfig, SubsystemSelector, TorusSpec,
};

const BIN: &str = env!("CARGO_BIN_EXE_torus-entropy");

#[derive(Clone, Copy, PartialEq)]
enum Verdict {
    Pass,
    Fail,
    /// The criterion's literal target is unattainable; the line explains
    /// what was checked instead.
    Deviation,
}

struct Outcome {
    verdict: Verdict,
    detail: String,
}

fn pass_if(ok: bool, detail: String) -> Outcome {
    Outcome {
        verdict: if ok { Verdict::Pass } else { Verdict::Fail },
        detail,
    }
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run_cli(args: &[&str], threads: Option<&str>) -> std::process::Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("TORUS_ENTROPY_THREADS", t),
        None => cmd.env_remove("TORUS_ENTROPY_THREADS"),
    };
    cmd.output().expect("binary runs")
}

fn csv_rows(bytes: &[u8]) -> Vec<Vec<f64>> {
    let mut rdr = csv::Reader::from_reader(bytes);
    rdr.records()
        .map(|r| {
            r.unwrap()
                .iter()
                .map(|f| f.parse::<f64>().unwrap())
                .collect()
        })
        .collect()
}

fn three_sweep() -> Vec<torus_entropy::NormalModeSystem> {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_501);
    (0..50)
        .map(|_| three_oscillator_system(&sample_three_oscillator(&mut rng)).unwrap())
        .collect()
}

fn quantum_values(sys: &torus_entropy::NormalModeSystem, sel: &SubsystemSelector) -> (f64, f64) {
    let h = HBar::default();
    let cov = quantum_gaussian_covariance(sys, h).unwrap();
    let sub = subsystem_covariance(&cov, sel).unwrap();
    (
        quantum_purity(&sub, h).unwrap(),
        quantum_entropy(&sub, h).unwrap(),
    )
}

fn criterion_1() -> Outcome {
    let mut worst = 0.0_f64;
    for sys in three_sweep() {
        for sel in SubsystemSelector::all_subsets(3) {
            let classical = report(&sys, &sel, 1.0).unwrap().purity;
            worst = worst.max((classical - quantum_values(&sys, &sel).0).abs());
        }
    }
    pass_if(
        worst < 1e-12,
        format!("50 draws x 7 subsystems, max |purity diff| = {worst:.2e} (< 1e-12)"),
    )
}

fn criterion_2() -> Outcome {
    let (mut worst, mut full) = (0.0_f64, 0.0_f64);
    for sys in three_sweep() {
        for sel in SubsystemSelector::all_subsets(3) {
            let classical = report(&sys, &sel, 1.0).unwrap().von_neumann;
            worst = worst.max((classical - quantum_values(&sys, &sel).1).abs());
            if sel.len() == 3 {
                full = full.max(classical.abs());
            }
        }
    }
    pass_if(
        worst < 1e-10 && full < 1e-10,
        format!(
            "max |entropy diff| = {worst:.2e} (< 1e-10), max |S(1,2,3)| = {full:.2e} (< 1e-10)"
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (one, pair) = (
        SubsystemSelector::new(vec![1]).unwrap(),
        SubsystemSelector::full(2),
    );
    let (mut unrooted_gap, mut corrected_gap, mut quantum_gap, mut pair_gap) =
        (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..50 {
        let p = sample_two_oscillator(&mut rng);
        let sys = two_oscillator_system(&p).unwrap();
        let mu = report(&sys, &one, 1.0).unwrap().purity;
        unrooted_gap = unrooted_gap.max((mu - unrooted_purity_2osc(&p).unwrap()).abs());
        corrected_gap = corrected_gap.max((mu - reference_purity_2osc(&one, &p).unwrap()).abs());
        quantum_gap = quantum_gap.max((mu - quantum_values(&sys, &one).0).abs());
        pair_gap = pair_gap.max((report(&sys, &pair, 1.0).unwrap().purity - 1.0).abs());
    }
    let detail = format!(
        "√((4AB−C²)/4AB) misses by up to {unrooted_gap:.2e}; against the ground state {quantum_gap:.2e}, \
         against the corrected closed form {corrected_gap:.2e}, |μ(1,2) − 1| ≤ {pair_gap:.2e}"
    );
    let corrected_ok = corrected_gap < 1e-12 && quantum_gap < 1e-12 && pair_gap < 1e-12;
    Outcome {
        verdict: if corrected_ok {
            Verdict::Deviation
        } else {
            Verdict::Fail
        },
        detail,
    }
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0_f64;
    for _ in 0..25 {
        let systems = [
            three_oscillator_system(&sample_three_oscillator(&mut rng)).unwrap(),
            two_oscillator_system(&sample_two_oscillator(&mut rng)).unwrap(),
        ];
        for sys in &systems {
            for sel in SubsystemSelector::all_subsets(sys.n_dof()) {
                let a = report(sys, &sel, 1.0).unwrap();
                let b = report(sys, &sel, 2.7).unwrap();
                worst = worst
                    .max((a.purity - b.purity).abs())
                    .max((a.linear_entropy - b.linear_entropy).abs())
                    .max((a.von_neumann - b.von_neumann).abs());
                for (x, y) in a.spectrum.values().iter().zip(b.spectrum.values()) {
                    worst = worst.max((x - y).abs());
                }
            }
        }
    }
    pass_if(
        worst < 1e-12,
        format!("β = 1 vs 2.7, max difference {worst:.2e} (< 1e-12)"),
    )
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cfg = QuadratureConfig::trapezoid(16);
    let mut worst = 0.0_f64;
    let mut slowest = Duration::ZERO;
    for _ in 0..5 {
        let sys = three_oscillator_system(&sample_three_oscillator(&mut rng)).unwrap();
        let torus = TorusSpec::new((0..3).map(|_| rng.random_range(0.2..2.0)).collect()).unwrap();
        let t = Instant::now();
        let quad = covariance_by_quadrature(&sys, &torus, &cfg).unwrap();
        slowest = slowest.max(t.elapsed());
        worst = worst.max(quad.max_abs_diff(&covariance_normal_form(&sys, &torus).unwrap()));

        let pair = two_oscillator_system(&sample_two_oscillator(&mut rng)).unwrap();
        let torus =
            TorusSpec::new(vec![rng.random_range(0.2..2.0), rng.random_range(0.2..2.0)]).unwrap();
        let quad = covariance_by_quadrature(&pair, &torus, &cfg).unwrap();
        worst = worst.max(quad.max_abs_diff(&covariance_normal_form(&pair, &torus).unwrap()));
    }
    pass_if(
        worst < 1e-10 && slowest < Duration::from_secs(2),
        format!("16 nodes per angle, max entry diff {worst:.2e} (< 1e-10), slowest N=3 grid {slowest:.2?} (< 2 s)"),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0_f64;
    for i in 0..100 {
        let n = 1 + i % 3;
        let dim = 2 * n;
        let g = DMatrix::from_fn(dim, dim, |_, _| rng.random_range(-0.6..0.6));
        let g = (&g + g.transpose()) * 0.5;
        let m = (symplectic_form(n).matrix() * g).exp();
        let d: Vec<f64> = (0..n).map(|_| rng.random_range(0.3..3.0)).collect();
        let diag: Vec<f64> = d.iter().chain(&d).copied().collect();
        let sigma = m.transpose() * DMatrix::from_diagonal(&DVector::from_vec(diag)) * &m;
        let sigma = (&sigma + sigma.transpose()) * 0.5;
        let spectrum = williamson_eigenvalues(&CovarianceMatrix::new(sigma).unwrap()).unwrap();
        let mut want = d;
        want.sort_by(f64::total_cmp);
        for (a, b) in spectrum.values().iter().zip(&want) {
            worst = worst.max((a - b).abs());
        }
    }
    pass_if(
        worst < 1e-10,
        format!("100 constructed spectra (n ≤ 3), max error {worst:.2e} (< 1e-10)"),
    )
}

fn criterion_7() -> Outcome {
    let rules = QuantizationRules::ground_state();
    let (c, q) = (
        classical_covariance_symbolic(),
        quantum_covariance_symbolic(),
    );
    let mut mismatches = Vec::new();
    let mut checked = 0;
    for ((name, cs), (_, qs)) in c.named().into_iter().zip(q.named()) {
        let got = apply_quantization(cs, &rules).unwrap();
        for (k, (a, b)) in got.terms().iter().zip(qs.terms()).enumerate() {
            checked += 1;
            if a != b {
                mismatches.push(format!("{name} λ^{k}"));
            }
        }
    }
    pass_if(
        mismatches.is_empty() && checked == 9,
        format!("{checked} rational coefficients compared exactly, mismatches: {mismatches:?}"),
    )
}

fn criterion_8() -> Outcome {
    let t = Instant::now();
    let base = QuarticOscillator::unit(0.0).unwrap();
    let rows = verify_lambdas(&base, 0.5, &[0.0, 2.5e-3, 5e-3, 7.5e-3, 1e-2]);
    let fit = fit_oracle(&rows, -1.0 / 32.0);
    let elapsed = t.elapsed();
    match fit {
        Some(f) => {
            let slope = f.residual_slope.unwrap_or(f64::NAN);
            pass_if(
                f.linear_relative_error < 0.01 && (slope - 3.0).abs() <= 0.3 && elapsed < Duration::from_secs(30),
                format!(
                    "fitted λ¹ coefficient {:.9} (relative error {:.2e}, < 1%), residual slope {slope:.4} (3 ± 0.3), {elapsed:.2?} (< 30 s)",
                    f.coefficients[1], f.linear_relative_error
                ),
            )
        }
        None => pass_if(
            false,
            format!("oracle failed: {:?}", rows.iter().find_map(|r| r.error())),
        ),
    }
}

fn criterion_9() -> Outcome {
    let out = run_cli(
        &["fig-variance", "--lambda-max", "0.5", "--steps", "100"],
        None,
    );
    if !out.status.success() {
        return pass_if(
            false,
            format!("fig-variance exited with {:?}", out.status.code()),
        );
    }
    let rows = csv_rows(&out.stdout);
    let dec = rows.windows(2).all(|w| w[1][1] < w[0][1]);
    let inc = rows.windows(2).all(|w| w[1][2] > w[0][2]);
    let start = rows[0][1] == 0.25 && rows[0][2] == 0.25;
    pass_if(
        dec && inc && start && rows.len() == 101,
        format!(
            "{} rows over λ ∈ [0, 0.5]: classical decreasing {dec}, quantum increasing {inc}, both 0.25 at λ=0 {start}",
            rows.len()
        ),
    )
}

fn criterion_10() -> Outcome {
    let out = run_cli(
        &[
            "fig-entropy",
            "--ratio-min",
            "0.125",
            "--ratio-max",
            "8",
            "--steps",
            "96",
        ],
        None,
    );
    if !out.status.success() {
        return pass_if(
            false,
            format!("fig-entropy exited with {:?}", out.status.code()),
        );
    }
    let rows = csv_rows(&out.stdout);
    let n = rows.len() - 1;
    let at_one = &rows[n / 2];
    let zero = at_one[0] == 1.0 && at_one[1].abs() < 1e-10 && at_one[2].abs() < 1e-10;
    let mut asym = 0.0_f64;
    for k in 0..=n {
        asym = asym
            .max((rows[k][1] - rows[n - k][1]).abs())
            .max((rows[k][2] - rows[n - k][2]).abs());
    }
    // exact reciprocal pair through the library
    let middle = SubsystemSelector::new(vec![2]).unwrap();
    let sys =
        |r: f64| torus_entropy::models::three_oscillator_from_frequencies([r, 1.0, 1.0]).unwrap();
    let (a, b) = (
        report(&sys(4.0), &middle, 1.0).unwrap(),
        report(&sys(0.25), &middle, 1.0).unwrap(),
    );
    asym = asym
        .max((a.von_neumann - b.von_neumann).abs())
        .max((a.linear_entropy - b.linear_entropy).abs());
    pass_if(
        zero && asym < 1e-12,
        format!(
            "values at ratio 1: ({:.1e}, {:.1e}) (< 1e-10); max r ↔ 1/r gap {asym:.2e} (< 1e-12)",
            at_one[1], at_one[2]
        ),
    )
}

fn criterion_11() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let config = configs().join("three_oscillator.json");
    let mut outputs = Vec::new();
    for (i, threads) in [None, None, Some("1"), Some("4")].into_iter().enumerate() {
        let path = dir.path().join(format!("report-{i}.json"));
        let out = run_cli(
            &[
                "report",
                "-c",
                config.to_str().unwrap(),
                "--format",
                "json",
                "-o",
                path.to_str().unwrap(),
            ],
            threads,
        );
        if !out.status.success() {
            return pass_if(false, format!("report exited with {:?}", out.status.code()));
        }
        outputs.push(std::fs::read(&path).unwrap());
    }
    let identical = outputs.windows(2).all(|w| w[0] == w[1]);
    pass_if(
        identical,
        format!("4 runs (default, default, 1 thread, 4 threads) byte-identical: {identical}"),
    )
}

type Check = fn() -> Outcome;

fn main() {
    let criteria: [(&str, Check); 11] = [
        ("classical and quantum purity agree", criterion_1),
        ("classical and quantum entropy agree", criterion_2),
        ("two-oscillator purity closed form", criterion_3),
        ("tilde quantities independent of β", criterion_4),
        (
            "quadrature reproduces the closed-form covariance",
            criterion_5,
        ),
        ("Williamson eigenvalues recovered", criterion_6),
        (
            "quantization rules bridge the anharmonic series",
            criterion_7,
        ),
        ("time-average oracle fit", criterion_8),
        ("variance products move apart with λ", criterion_9),
        ("middle-particle entropy curve", criterion_10),
        ("report output is deterministic", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = check();
        let tag = match outcome.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => {
                failed += 1;
                "FAIL"
            }
            Verdict::Deviation => "DEVIATION",
        };
        println!(
            "criterion {:>2} {tag:<9} {name}: {} [{:.2?}]",
            i + 1,
            outcome.detail,
            t.elapsed()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria met or accounted for");
}
