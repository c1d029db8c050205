use std::path::PathBuf;

use clap::{Args, Subcommand};
use serde::Serialize;
use torus_entropy::analogs::{classical_purity, purity_exceeds_unity, report};
use torus_entropy::anharmonic::{
    classical_covariance_series, fit_oracle, variance_product_series, verify_lambdas,
    QuarticOscillator, Side,
};
use torus_entropy::models::three_oscillator_from_frequencies;
use torus_entropy::quantum::{quantum_entropy, quantum_gaussian_covariance, quantum_purity};
use torus_entropy::{
    covariance_by_quadrature, covariance_normal_form, subsystem_covariance, HBar, QuadratureConfig,
    SubsystemSelector,
};

use crate::config::ModelConfig;
use crate::error::{CliError, CliResult};
use crate::output::{floats, fmt_float, open_sink, write_csv, write_json, Float, Format};

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the classical covariance matrix of a model.
    Covariance(CovarianceArgs),
    /// Purity, linear entropy and entropy analogs per subsystem, next to
    /// the Gaussian ground-state values.
    Report(ReportArgs),
    /// Variance products ⟨q²⟩⟨p²⟩ of the quartic oscillator against λ.
    FigVariance(FigVarianceArgs),
    /// Entropy analogs of the middle particle against ω1/ω2.
    FigEntropy(FigEntropyArgs),
    /// Perturbation series of ⟨q²⟩ against numerical orbit averages.
    AnharmonicVerify(AnharmonicArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output file; stdout when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct CovarianceArgs {
    #[arg(long, short)]
    pub config: PathBuf,
    /// Uniform action for every mode; overrides the file.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Average on an M-point grid per angle instead of the closed form.
    #[arg(long)]
    pub nodes: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long, short)]
    pub config: PathBuf,
    /// `all`, or subsystems such as `(1),(1,3)` or `1;1,3`.
    #[arg(long, default_value = "all")]
    pub subsystems: String,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Overrides `hbar` from the file.
    #[arg(long)]
    pub hbar: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct FigVarianceArgs {
    #[arg(long, default_value_t = 0.5)]
    pub lambda_max: f64,
    #[arg(long, default_value_t = 50)]
    pub steps: usize,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    #[arg(long, default_value_t = 0.5)]
    pub action: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct FigEntropyArgs {
    #[arg(long, default_value_t = 0.25)]
    pub ratio_min: f64,
    #[arg(long, default_value_t = 4.0)]
    pub ratio_max: f64,
    /// Intervals of the log-spaced ratio grid.
    #[arg(long, default_value_t = 64)]
    pub steps: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct AnharmonicArgs {
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0,2.5e-3,5e-3,7.5e-3,1e-2",
        allow_hyphen_values = true
    )]
    pub lambdas: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega0: f64,
    #[arg(long, default_value_t = 0.5)]
    pub action: f64,
    /// Report failing rows and exit 0 instead of stopping.
    #[arg(long)]
    pub keep_going: bool,
    #[command(flatten)]
    pub common: Common,
}

pub fn run(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Covariance(a) => covariance(a),
        Command::Report(a) => report_cmd(a),
        Command::FigVariance(a) => fig_variance(a),
        Command::FigEntropy(a) => fig_entropy(a),
        Command::AnharmonicVerify(a) => anharmonic_verify(a),
    }
}

fn covariance(a: CovarianceArgs) -> CliResult<()> {
    let cfg = ModelConfig::load(&a.config)?;
    let torus = cfg.torus(a.beta)?;
    let cov = match a.nodes {
        None => covariance_normal_form(&cfg.system, &torus)?,
        Some(m) => {
            let q = QuadratureConfig::trapezoid(m);
            q.validate().map_err(|e| CliError::config(e.to_string()))?;
            covariance_by_quadrature(&cfg.system, &torus, &q)?
        }
    };
    let labels = cov.coordinate_labels();
    let m = cov.matrix();
    let rows: Vec<Vec<f64>> = (0..cov.dim())
        .map(|r| m.row(r).iter().copied().collect())
        .collect();
    let sink = open_sink(a.common.output.as_deref())?;
    match a.common.format {
        Format::Csv => {
            let header: Vec<&str> = labels.iter().map(String::as_str).collect();
            let text: Vec<Vec<String>> = rows
                .iter()
                .map(|r| r.iter().copied().map(fmt_float).collect())
                .collect();
            write_csv(sink, &header, &text)
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Out<'a> {
                model: &'a str,
                actions: Vec<Float>,
                labels: Vec<String>,
                matrix: Vec<Vec<Float>>,
            }
            let out = Out {
                model: cfg.system.label(),
                actions: floats(torus.actions()),
                labels,
                matrix: rows.iter().map(|r| floats(r)).collect(),
            };
            write_json(sink, &out)
        }
    }
}

/// `all`, `(1),(1,3)` or `1;1,3`.
pub fn parse_subsystems(list: &str, n: usize) -> CliResult<Vec<SubsystemSelector>> {
    let list: String = list.chars().filter(|c| !c.is_whitespace()).collect();
    if list.eq_ignore_ascii_case("all") {
        return Ok(SubsystemSelector::all_subsets(n));
    }
    let groups: Vec<&str> = if list.contains('(') {
        list.split(')')
            .map(|g| g.trim_start_matches(',').trim_start_matches('('))
            .filter(|g| !g.is_empty())
            .collect()
    } else {
        list.split(';').filter(|g| !g.is_empty()).collect()
    };
    if groups.is_empty() {
        return Err(CliError::config("no subsystems given"));
    }
    groups
        .into_iter()
        .map(|g| {
            let idx = g
                .split(',')
                .map(|s| {
                    s.parse::<usize>()
                        .map_err(|_| CliError::config(format!("bad particle index {s:?}")))
                })
                .collect::<CliResult<Vec<_>>>()?;
            let sel = SubsystemSelector::from_unordered(idx)
                .map_err(|e| CliError::config(e.to_string()))?;
            sel.check_range(n)
                .map_err(|e| CliError::config(e.to_string()))?;
            Ok(sel)
        })
        .collect()
}

#[derive(Debug, Serialize)]
struct Record {
    subsystem: String,
    purity: Float,
    linear_entropy: Float,
    von_neumann: Float,
    spectrum: Vec<Float>,
    quantum_purity: Float,
    quantum_linear_entropy: Float,
    quantum_von_neumann: Float,
    purity_abs_diff: Float,
    von_neumann_abs_diff: Float,
    #[serde(skip_serializing_if = "Option::is_none")]
    purity_at_actions: Option<Float>,
    #[serde(skip_serializing_if = "Option::is_none")]
    purity_exceeds_unity: Option<bool>,
}

fn report_cmd(a: ReportArgs) -> CliResult<()> {
    let cfg = ModelConfig::load(&a.config)?;
    let beta = cfg.beta(a.beta)?;
    let hbar = match a.hbar {
        Some(h) => HBar::new(h).map_err(|e| CliError::config(e.to_string()))?,
        None => cfg.hbar,
    };
    let sels = parse_subsystems(&a.subsystems, cfg.system.n_dof())?;
    let quantum_cov = quantum_gaussian_covariance(&cfg.system, hbar)?;
    let raw_actions = cfg.non_uniform_actions();
    let raw_cov = match &raw_actions {
        Some(t) => Some(covariance_normal_form(&cfg.system, t)?),
        None => None,
    };
    let mut records = Vec::with_capacity(sels.len());
    for sel in &sels {
        let r = report(&cfg.system, sel, beta)?;
        let qsub = subsystem_covariance(&quantum_cov, sel)?;
        let qp = quantum_purity(&qsub, hbar)?;
        let qs = quantum_entropy(&qsub, hbar)?;
        let at_actions = match (&raw_cov, &raw_actions) {
            (Some(cov), Some(t)) => Some(classical_purity(
                &subsystem_covariance(cov, sel)?,
                &t.restrict(sel)?,
            )?),
            _ => None,
        };
        if let Some(mu) = at_actions.filter(|mu| purity_exceeds_unity(*mu)) {
            eprintln!("warning: purity at the configured actions exceeds 1 for {sel} ({mu})");
        }
        records.push(Record {
            subsystem: sel.to_string(),
            purity: Float(r.purity),
            linear_entropy: Float(r.linear_entropy),
            von_neumann: Float(r.von_neumann),
            spectrum: floats(r.spectrum.values()),
            quantum_purity: Float(qp),
            quantum_linear_entropy: Float(1.0 - qp),
            quantum_von_neumann: Float(qs),
            purity_abs_diff: Float((r.purity - qp).abs()),
            von_neumann_abs_diff: Float((r.von_neumann - qs).abs()),
            purity_at_actions: at_actions.map(Float),
            purity_exceeds_unity: at_actions.map(purity_exceeds_unity),
        });
    }
    let sink = open_sink(a.common.output.as_deref())?;
    match a.common.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Out<'a> {
                model: &'a str,
                beta: Float,
                hbar: Float,
                records: Vec<Record>,
            }
            write_json(
                sink,
                &Out {
                    model: cfg.system.label(),
                    beta: Float(beta),
                    hbar: Float(hbar.value()),
                    records,
                },
            )
        }
        Format::Csv => {
            let mut header = vec![
                "subsystem",
                "purity",
                "linear_entropy",
                "von_neumann",
                "spectrum",
                "quantum_purity",
                "quantum_linear_entropy",
                "quantum_von_neumann",
                "purity_abs_diff",
                "von_neumann_abs_diff",
            ];
            if raw_actions.is_some() {
                header.extend(["purity_at_actions", "purity_exceeds_unity"]);
            }
            let rows: Vec<Vec<String>> = records
                .iter()
                .map(|r| {
                    let mut row = vec![r.subsystem.clone()];
                    row.extend([r.purity, r.linear_entropy, r.von_neumann].map(|f| fmt_float(f.0)));
                    row.push(
                        r.spectrum
                            .iter()
                            .map(|f| fmt_float(f.0))
                            .collect::<Vec<_>>()
                            .join(";"),
                    );
                    row.extend(
                        [
                            r.quantum_purity,
                            r.quantum_linear_entropy,
                            r.quantum_von_neumann,
                            r.purity_abs_diff,
                            r.von_neumann_abs_diff,
                        ]
                        .map(|f| fmt_float(f.0)),
                    );
                    if let (Some(mu), Some(flag)) = (r.purity_at_actions, r.purity_exceeds_unity) {
                        row.push(fmt_float(mu.0));
                        row.push(flag.to_string());
                    }
                    row
                })
                .collect();
            write_csv(sink, &header, &rows)
        }
    }
}

fn check_steps(steps: usize) -> CliResult<()> {
    if steps == 0 {
        return Err(CliError::config("steps must be at least 1"));
    }
    Ok(())
}

fn fig_variance(a: FigVarianceArgs) -> CliResult<()> {
    check_steps(a.steps)?;
    if !(a.lambda_max > 0.0 && a.lambda_max.is_finite()) {
        return Err(CliError::config(format!(
            "lambda-max must be positive, got {}",
            a.lambda_max
        )));
    }
    let osc = QuarticOscillator::new(a.mass, a.omega0, 0.0)
        .map_err(|e| CliError::config(e.to_string()))?;
    let classical = variance_product_series(Side::Classical, &osc, a.action)
        .map_err(|e| CliError::config(e.to_string()))?;
    let quantum = variance_product_series(Side::Quantum, &osc, a.hbar)
        .map_err(|e| CliError::config(e.to_string()))?;
    let rows: Vec<[f64; 3]> = (0..=a.steps)
        .map(|k| {
            let lambda = a.lambda_max * k as f64 / a.steps as f64;
            [lambda, classical.eval(lambda), quantum.eval(lambda)]
        })
        .collect();
    emit_table(a.common, &["lambda", "classical", "quantum"], &rows)
}

/// Log-spaced grid whose logarithms are exactly antisymmetric when
/// `min = 1/max`.
pub fn ratio_grid(min: f64, max: f64, steps: usize) -> Vec<f64> {
    let (lo, hi) = (min.ln(), max.ln());
    let s = steps as f64;
    (0..=steps)
        .map(|k| {
            let t = (lo * (steps - k) as f64) / s + (hi * k as f64) / s;
            t.exp()
        })
        .collect()
}

fn fig_entropy(a: FigEntropyArgs) -> CliResult<()> {
    check_steps(a.steps)?;
    if !(a.ratio_min > 0.0 && a.ratio_max > a.ratio_min && a.ratio_max.is_finite()) {
        return Err(CliError::config(format!(
            "need 0 < ratio-min < ratio-max, got {} and {}",
            a.ratio_min, a.ratio_max
        )));
    }
    let middle = SubsystemSelector::new(vec![2]).expect("valid selector");
    let rows = ratio_grid(a.ratio_min, a.ratio_max, a.steps)
        .into_iter()
        .map(|r| {
            // only ω1/ω2 enters the middle particle's values
            let sys = three_oscillator_from_frequencies([r, 1.0, 1.0])?;
            let rep = report(&sys, &middle, 1.0)?;
            Ok([r, rep.von_neumann, rep.linear_entropy])
        })
        .collect::<Result<Vec<_>, torus_entropy::Error>>()?;
    emit_table(a.common, &["ratio", "entropy", "linear_entropy"], &rows)
}

fn emit_table<const W: usize>(
    common: Common,
    header: &[&str; W],
    rows: &[[f64; W]],
) -> CliResult<()> {
    let sink = open_sink(common.output.as_deref())?;
    match common.format {
        Format::Csv => {
            let text: Vec<Vec<String>> = rows
                .iter()
                .map(|r| r.iter().copied().map(fmt_float).collect())
                .collect();
            write_csv(sink, header, &text)
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Out<'a> {
                columns: &'a [&'a str],
                rows: Vec<Vec<Float>>,
            }
            write_json(
                sink,
                &Out {
                    columns: header,
                    rows: rows.iter().map(|r| floats(r)).collect(),
                },
            )
        }
    }
}

#[derive(Debug, Serialize)]
struct VerifyRow {
    lambda: Float,
    series: Option<Float>,
    oracle: Option<Float>,
    residual: Option<Float>,
    status: String,
}

fn anharmonic_verify(a: AnharmonicArgs) -> CliResult<()> {
    if a.lambdas.is_empty() {
        return Err(CliError::config("no lambdas given"));
    }
    let base = QuarticOscillator::new(a.mass, a.omega0, 0.0)
        .map_err(|e| CliError::config(e.to_string()))?;
    classical_covariance_series(&base, a.action).map_err(|e| CliError::config(e.to_string()))?;
    let results = verify_lambdas(&base, a.action, &a.lambdas);
    if !a.keep_going {
        if let Some(e) = results.iter().find_map(|r| r.error()) {
            return Err(CliError::Numeric(e.clone()));
        }
    }
    let rows: Vec<VerifyRow> = results
        .iter()
        .map(|r| VerifyRow {
            lambda: Float(r.lambda),
            series: r.series.as_ref().ok().copied().map(Float),
            oracle: r.oracle.as_ref().ok().map(|o| Float(o.q2)),
            residual: r.residual().map(Float),
            status: r
                .error()
                .map_or_else(|| "ok".to_string(), |e| format!("error: {e}")),
        })
        .collect();
    let expected = classical_covariance_series(&base, a.action)?
        .qq
        .coefficient(1);
    let fit = fit_oracle(&results, expected);
    let slope = fit.as_ref().and_then(|f| f.residual_slope);
    let sink = open_sink(a.common.output.as_deref())?;
    match a.common.format {
        Format::Csv => {
            match (&fit, slope) {
                (Some(f), Some(s)) => eprintln!(
                    "residual log-log slope {s:.4}; fitted first-order coefficient {} (relative error {:.3e})",
                    fmt_float(f.coefficients[1]),
                    f.linear_relative_error
                ),
                _ => eprintln!("too few successful rows for a fit"),
            }
            let opt = |x: Option<Float>| x.map_or_else(String::new, |f| fmt_float(f.0));
            let text: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        fmt_float(r.lambda.0),
                        opt(r.series),
                        opt(r.oracle),
                        opt(r.residual),
                        r.status.clone(),
                    ]
                })
                .collect();
            write_csv(
                sink,
                &["lambda", "series", "oracle", "residual", "status"],
                &text,
            )
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Summary {
                residual_slope: Option<Float>,
                fitted_coefficients: Option<Vec<Float>>,
                first_order_relative_error: Option<Float>,
            }
            #[derive(Serialize)]
            struct Out {
                rows: Vec<VerifyRow>,
                summary: Summary,
            }
            let summary = Summary {
                residual_slope: slope.map(Float),
                fitted_coefficients: fit.as_ref().map(|f| floats(&f.coefficients)),
                first_order_relative_error: fit.as_ref().map(|f| Float(f.linear_relative_error)),
            };
            write_json(sink, &Out { rows, summary })
        }
    }
}
