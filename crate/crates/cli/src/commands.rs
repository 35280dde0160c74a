//! The four subcommands. Each returns the text for stdout and an exit status;
//! files are written atomically.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ltll_core::bayes::{credible_ellipse, run_chain_with, PosteriorResult};
use ltll_core::dist::{mc_moments, LtllParams};
use ltll_core::exec::Execution;
use ltll_core::mle::{confidence_ellipse, fit_mle, EllipsePoints, MleFit};
use ltll_core::numerics::{Interval, RngStream, SymMatrix2};
use ltll_core::sim::{
    sample_size_sweep, truncation_sweep, write_bias_variance_table, write_sample_size_table,
    write_truncation_table, MetricsReport, Scenario, DEFAULT_SAMPLE_SIZES, DEFAULT_TRUNCATIONS,
};
use serde::Serialize;

use crate::args::{
    parse_grid, parse_list, EllipseArgs, EllipseMethod, FitArgs, Format, Method, MomentsArgs,
    SimulateArgs, Sweep,
};
use crate::data::{apply_truncation, load_csv, ColumnSelector, Truncated, BUILTIN_BLADDER};
use crate::output::{to_json, write_atomic};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    /// Only a Pareto boundary fit was produced.
    Boundary,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Success => 0,
            Status::Boundary => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub stdout: String,
    pub warnings: Vec<String>,
    pub files: Vec<PathBuf>,
    pub status: Status,
}

/// One estimation result as written by `fit`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitDocument {
    pub method: &'static str,
    pub alpha: Option<f64>,
    pub beta: f64,
    pub ci_alpha: Option<[f64; 2]>,
    pub ci_beta: Option<[f64; 2]>,
    #[serde(rename = "x_L")]
    pub x_l: f64,
    pub n: usize,
    pub dropped: usize,
    pub boundary: bool,
    pub loglik: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub acceptance_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ess: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub units: Option<String>,
    pub seed: Option<u64>,
}

fn interval_pair(i: Option<Interval>) -> Option<[f64; 2]> {
    i.map(|i| [i.lower, i.upper])
}

fn load(data: &crate::args::DataArgs) -> Result<(Truncated, Vec<String>)> {
    let path = data.data.as_deref().unwrap_or(BUILTIN_BLADDER);
    let column = data
        .column
        .as_deref()
        .map(ColumnSelector::parse)
        .unwrap_or_default();
    let file = load_csv(path, &column)?;
    let warnings = file.warnings();
    Ok((apply_truncation(&file, data.xl.unwrap_or(0.0))?, warnings))
}

fn mle_document(t: &Truncated, fit: &MleFit, units: Option<String>) -> FitDocument {
    FitDocument {
        method: "mle",
        alpha: fit.alpha(),
        beta: fit.beta(),
        ci_alpha: interval_pair(fit.ci_alpha),
        ci_beta: interval_pair(fit.ci_beta),
        x_l: t.sample.x_l(),
        n: t.retained,
        dropped: t.dropped,
        boundary: fit.boundary,
        loglik: Some(fit.loglik),
        acceptance_rate: None,
        ess: None,
        units,
        seed: None,
    }
}

fn bayes_document(
    t: &Truncated,
    post: &PosteriorResult,
    units: Option<String>,
    seed: u64,
) -> FitDocument {
    let loglik = ltll_core::dist::log_likelihood(&t.sample, post.mean[0], post.mean[1]).ok();
    FitDocument {
        method: "bayes",
        alpha: Some(post.mean[0]),
        beta: post.mean[1],
        ci_alpha: interval_pair(Some(post.ci_alpha)),
        ci_beta: interval_pair(Some(post.ci_beta)),
        x_l: t.sample.x_l(),
        n: t.retained,
        dropped: t.dropped,
        boundary: false,
        loglik,
        acceptance_rate: Some(post.acceptance_rate),
        ess: Some([post.ess_alpha, post.ess_beta]),
        units,
        seed: Some(seed),
    }
}

const FIT_CSV_HEADER: &str =
    "method,alpha,beta,alpha_ci_l,alpha_ci_u,beta_ci_l,beta_ci_u,x_L,n,boundary,loglik";

fn fit_csv(docs: &[FitDocument]) -> String {
    let num = |v: Option<f64>| v.map_or(String::new(), |v| format!("{v:.6}"));
    let mut out = format!("{FIT_CSV_HEADER}\n");
    for d in docs {
        let [al, au] = d.ci_alpha.map_or([None; 2], |c| [Some(c[0]), Some(c[1])]);
        let [bl, bu] = d.ci_beta.map_or([None; 2], |c| [Some(c[0]), Some(c[1])]);
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            d.method,
            num(d.alpha),
            num(Some(d.beta)),
            num(al),
            num(au),
            num(bl),
            num(bu),
            num(Some(d.x_l)),
            d.n,
            d.boundary,
            num(d.loglik)
        )
        .unwrap();
    }
    out
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::default()
    }
}

pub fn cmd_fit(args: FitArgs) -> Result<Outcome> {
    let seed = args.common.seed()?;
    let (t, warnings) = load(&args.data)?;
    let method = args.method.unwrap_or(Method::Mle);
    let mut docs = Vec::new();
    let mut boundary_only = false;
    if matches!(method, Method::Mle | Method::Both) {
        let fit = fit_mle(&t.sample)?;
        boundary_only = fit.boundary && method == Method::Mle;
        docs.push(mle_document(&t, &fit, args.data.units.clone()));
    }
    if matches!(method, Method::Bayes | Method::Both) {
        let prior = args.mcmc.prior()?;
        let cfg = args.mcmc.config(seed)?;
        let post = run_chain_with(&t.sample, &prior, &cfg, Execution::Sequential)?;
        docs.push(bayes_document(&t, &post, args.data.units.clone(), seed));
    }
    let body = match args.format.unwrap_or(Format::Json) {
        Format::Json if docs.len() == 1 => to_json(&docs[0])?,
        Format::Json => to_json(&docs)?,
        Format::Csv => fit_csv(&docs),
    };
    let mut files = Vec::new();
    let stdout = match &args.common.out {
        Some(path) => {
            write_atomic(path, &body)?;
            files.push(path.clone());
            summary_line(&docs)
        }
        None => body,
    };
    let status = if boundary_only {
        Status::Boundary
    } else {
        Status::Success
    };
    Ok(Outcome {
        stdout,
        warnings,
        files,
        status,
    })
}

fn summary_line(docs: &[FitDocument]) -> String {
    let mut s = String::new();
    for d in docs {
        match d.alpha {
            Some(a) => writeln!(
                s,
                "{}: alpha = {a:.4}, beta = {:.4} (n = {}, x_L = {})",
                d.method, d.beta, d.n, d.x_l
            ),
            None => writeln!(
                s,
                "{}: Pareto boundary fit, beta = {:.4}; alpha is not identified (n = {}, x_L = {})",
                d.method, d.beta, d.n, d.x_l
            ),
        }
        .unwrap();
    }
    s
}

#[derive(Debug, Serialize)]
struct TrendCheck {
    name: String,
    passed: bool,
}

fn trend(name: impl Into<String>, passed: bool) -> TrendCheck {
    TrendCheck {
        name: name.into(),
        passed,
    }
}

fn truncation_trends(reports: &[MetricsReport]) -> Vec<TrendCheck> {
    let mut checks = Vec::new();
    for r in reports {
        let var = |m: &Option<ltll_core::sim::MethodSummary>| m.map(|m| m.alpha.metrics.variance);
        let ok = matches!((var(&r.bayes), var(&r.mle)), (Some(b), Some(m)) if b < m);
        checks.push(trend(
            format!("x_L={}: Bayes var(alpha) < MLE var(alpha)", r.x_l),
            ok,
        ));
        let frac = r.credible_narrower_fraction;
        checks.push(trend(
            format!(
                "x_L={}: credible width <= Wald width in >= 60% of replicates",
                r.x_l
            ),
            frac.is_some_and(|f| f >= 0.6),
        ));
    }
    let bias: Vec<Option<f64>> = reports
        .iter()
        .map(|r| r.mle.map(|m| m.beta.metrics.bias.abs()))
        .collect();
    let nondecreasing =
        bias.iter().all(Option::is_some) && bias.windows(2).all(|w| w[1].unwrap() >= w[0].unwrap());
    checks.push(trend(
        "MLE |bias(beta)| nondecreasing in x_L",
        nondecreasing,
    ));
    checks
}

fn sample_size_trends(reports: &[MetricsReport]) -> Vec<TrendCheck> {
    let mut checks = Vec::new();
    type Pick = fn(&MetricsReport) -> Option<ltll_core::sim::MethodSummary>;
    let methods: [(&str, Pick); 2] = [("MLE", |r| r.mle), ("Bayes", |r| r.bayes)];
    for (name, pick) in methods {
        for (param, k) in [("alpha", 0), ("beta", 1)] {
            let col = |f: fn(&ltll_core::sim::ErrorMetrics) -> f64| -> Vec<Option<f64>> {
                reports
                    .iter()
                    .map(|r| {
                        pick(r).map(|m| {
                            f(if k == 0 {
                                &m.alpha.metrics
                            } else {
                                &m.beta.metrics
                            })
                        })
                    })
                    .collect()
            };
            let decreasing = |v: Vec<Option<f64>>| {
                v.iter().all(Option::is_some) && v.windows(2).all(|w| w[1].unwrap() < w[0].unwrap())
            };
            checks.push(trend(
                format!("{name} rmse({param}) strictly decreasing in n"),
                decreasing(col(|m| m.rmse)),
            ));
            checks.push(trend(
                format!("{name} var({param}) decreasing in n"),
                decreasing(col(|m| m.variance)),
            ));
        }
    }
    checks
}

pub fn cmd_simulate(args: SimulateArgs) -> Result<Outcome> {
    let seed = args.common.seed()?;
    let sweep = args.sweep.context("simulate needs --sweep truncation|n")?;
    let replicates = args
        .replicates
        .unwrap_or(if args.fast { 200 } else { 1000 });
    let alpha = args.alpha.unwrap_or(2.0);
    let beta = args.beta.unwrap_or(3.0);
    let base_xl = match sweep {
        Sweep::Truncation => 0.0,
        Sweep::N => args.xl.unwrap_or(1.0),
    };
    let mut sc = Scenario::new(
        LtllParams::new(alpha, beta, base_xl)?,
        args.n.unwrap_or(1000),
        replicates,
        seed,
    )?;
    sc.prior = args.mcmc.prior()?;
    sc.mcmc = args.mcmc.config(seed)?;
    let exec = execution(args.sequential);
    let dir = args
        .common
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("."));

    let (reports, checks, tables) = match sweep {
        Sweep::Truncation => {
            let x_ls = match &args.xl_list {
                Some(raw) => parse_list::<f64>(raw, "xl")?,
                None => DEFAULT_TRUNCATIONS.to_vec(),
            };
            let reports = truncation_sweep(&sc, &x_ls, exec)?;
            let tables = vec![
                ("truncation_estimates.csv", write_truncation_table(&reports)),
                (
                    "truncation_bias_variance.csv",
                    write_bias_variance_table(&reports),
                ),
            ];
            let checks = truncation_trends(&reports);
            (reports, checks, tables)
        }
        Sweep::N => {
            let ns = match &args.n_list {
                Some(raw) => parse_list::<usize>(raw, "n")?,
                None => DEFAULT_SAMPLE_SIZES.to_vec(),
            };
            let reports = sample_size_sweep(&sc, &ns, exec)?;
            let tables = vec![("sample_size_metrics.csv", write_sample_size_table(&reports))];
            let checks = sample_size_trends(&reports);
            (reports, checks, tables)
        }
    };
    let mut files = Vec::new();
    for (name, body) in &tables {
        let path = dir.join(name);
        write_atomic(&path, body)?;
        files.push(path);
    }
    #[derive(Serialize)]
    struct Summary<'a> {
        seed: u64,
        replicates: usize,
        reports: &'a [MetricsReport],
        trends: &'a [TrendCheck],
    }
    let summary_name = match sweep {
        Sweep::Truncation => "truncation_summary.json",
        Sweep::N => "sample_size_summary.json",
    };
    let path = dir.join(summary_name);
    write_atomic(
        &path,
        &to_json(&Summary {
            seed,
            replicates,
            reports: &reports,
            trends: &checks,
        })?,
    )?;
    files.push(path);

    let mut stdout = String::new();
    for c in &checks {
        writeln!(
            stdout,
            "{} {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name
        )
        .unwrap();
    }
    for f in &files {
        writeln!(stdout, "wrote {}", f.display()).unwrap();
    }
    Ok(Outcome {
        stdout,
        warnings: Vec::new(),
        files,
        status: Status::Success,
    })
}

/// Sidecar metadata for an ellipse polyline.
#[derive(Debug, Serialize)]
pub struct EllipseDocument {
    pub method: &'static str,
    pub center: [f64; 2],
    pub gamma: f64,
    /// χ²₂ quantile on the left side of the quadratic form.
    pub level: f64,
    /// Matrix `M` in `(θ − c)ᵀ M (θ − c) = level`.
    pub matrix: SymMatrix2,
    pub area: f64,
    #[serde(rename = "x_L")]
    pub x_l: f64,
    pub n: usize,
    pub n_points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub units: Option<String>,
}

fn ellipse_files(
    prefix: &Path,
    method: &'static str,
    e: &EllipsePoints,
    t: &Truncated,
    gamma: f64,
    units: Option<String>,
) -> Result<Vec<PathBuf>> {
    let mut csv = String::from("alpha,beta\n");
    for p in &e.points {
        writeln!(csv, "{:.10},{:.10}", p[0], p[1]).unwrap();
    }
    let doc = EllipseDocument {
        method,
        center: e.center,
        gamma,
        level: e.threshold,
        matrix: e.matrix,
        area: e.area(),
        x_l: t.sample.x_l(),
        n: t.retained,
        n_points: e.points.len(),
        units,
    };
    let stem = prefix
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let csv_path = prefix.with_file_name(format!("{stem}_{method}.csv"));
    let json_path = prefix.with_file_name(format!("{stem}_{method}.json"));
    write_atomic(&csv_path, &csv)?;
    write_atomic(&json_path, &to_json(&doc)?)?;
    Ok(vec![csv_path, json_path])
}

pub fn cmd_ellipse(args: EllipseArgs) -> Result<Outcome> {
    let seed = args.common.seed()?;
    let (t, warnings) = load(&args.data)?;
    let gamma = args.gamma.unwrap_or(0.05);
    let n_points = args.points.unwrap_or(100);
    let method = args.method.unwrap_or(EllipseMethod::Both);
    let prefix = args
        .common
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("ellipse"));
    let units = args.data.units.clone();
    let mut files = Vec::new();
    let mut stdout = String::new();

    if matches!(method, EllipseMethod::Wald | EllipseMethod::Both) {
        let fit = fit_mle(&t.sample)?;
        if fit.boundary {
            bail!(
                "the maximum likelihood fit at x_L = {} degenerates to a Pareto law (beta = {:.4}); \
                 alpha is not identified and no Wald ellipse exists",
                t.sample.x_l(),
                fit.beta()
            );
        }
        let e = confidence_ellipse(&fit, gamma, n_points)?;
        writeln!(stdout, "wald: area {:.6}", e.area()).unwrap();
        files.extend(ellipse_files(
            &prefix,
            "wald",
            &e,
            &t,
            gamma,
            units.clone(),
        )?);
    }
    if matches!(method, EllipseMethod::Credible | EllipseMethod::Both) {
        let post = run_chain_with(
            &t.sample,
            &args.mcmc.prior()?,
            &args.mcmc.config(seed)?,
            Execution::Sequential,
        )?;
        let e = credible_ellipse(&post, gamma, n_points)?;
        writeln!(stdout, "credible: area {:.6}", e.area()).unwrap();
        files.extend(ellipse_files(&prefix, "credible", &e, &t, gamma, units)?);
    }
    for f in &files {
        writeln!(stdout, "wrote {}", f.display()).unwrap();
    }
    Ok(Outcome {
        stdout,
        warnings,
        files,
        status: Status::Success,
    })
}

pub const MOMENTS_HEADER: &str = "alpha,beta,mean,variance,skewness,kurtosis";

/// Monte Carlo moments on the grid. Cells in one β column share a random
/// stream, so every surface is smooth in α. Moments of order `k ≥ β` do not
/// exist and are written as NaN.
pub fn cmd_moments(args: MomentsArgs) -> Result<Outcome> {
    let seed = args.common.seed()?;
    let x_l = args.xl.unwrap_or(0.70);
    let alphas = parse_grid(args.alpha_grid.as_deref().unwrap_or("0.5:5:10"))?;
    let betas = parse_grid(args.beta_grid.as_deref().unwrap_or("1.5:6:10"))?;
    let draws = args.draws.unwrap_or(20_000);
    if draws < 4 {
        bail!("--draws must be at least 4");
    }
    let mut out = format!("{MOMENTS_HEADER}\n");
    for &alpha in &alphas {
        for (j, &beta) in betas.iter().enumerate() {
            let p = LtllParams::new(alpha, beta, x_l)?;
            let m = mc_moments(&p, draws, &mut RngStream::new(seed, j as u64))?;
            let existing = |order: f64, v: f64| if beta > order { v } else { f64::NAN };
            let skew = m.skewness().unwrap_or(f64::NAN);
            let kurt = m.kurtosis().unwrap_or(f64::NAN);
            writeln!(
                out,
                "{alpha:.6},{beta:.6},{:.6},{:.6},{:.6},{:.6}",
                existing(1.0, m.mean),
                existing(2.0, m.variance),
                existing(3.0, skew),
                existing(4.0, kurt)
            )
            .unwrap();
        }
    }
    let mut files = Vec::new();
    let stdout = match &args.common.out {
        Some(path) => {
            write_atomic(path, &out)?;
            files.push(path.clone());
            format!("wrote {}\n", path.display())
        }
        None => out,
    };
    Ok(Outcome {
        stdout,
        warnings: Vec::new(),
        files,
        status: Status::Success,
    })
}
