//! Monte Carlo harness: replicate fits of both estimators on synthetic
//! samples, with bias/variance/RMSE summaries and CSV tables.
//!
//! Replicate `r` draws its sample from stream `r` of the master seed, so a
//! sweep over truncation points or sample sizes reuses the same uniforms.

mod tables;

pub use tables::{
    write_bias_variance_table, write_sample_size_table, write_truncation_table,
    BIAS_VARIANCE_HEADER, SAMPLE_SIZE_HEADER, TRUNCATION_HEADER,
};

use serde::Serialize;

use crate::bayes::{run_chain, McmcConfig, PriorSpec};
use crate::dist::{draw_ltll, LtllParams};
use crate::error::{LtllError, Result};
use crate::exec::Execution;
use crate::mle::fit_mle;
use crate::numerics::{derive_seed, Interval, RngStream};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub true_params: LtllParams,
    pub n: usize,
    pub replicates: usize,
    pub prior: PriorSpec,
    pub mcmc: McmcConfig,
    pub master_seed: u64,
    pub run_bayes: bool,
}

impl Scenario {
    pub fn new(
        true_params: LtllParams,
        n: usize,
        replicates: usize,
        master_seed: u64,
    ) -> Result<Self> {
        let sc = Self {
            true_params,
            n,
            replicates,
            prior: PriorSpec::default(),
            mcmc: McmcConfig::default(),
            master_seed,
            run_bayes: true,
        };
        sc.validate()?;
        Ok(sc)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates < 2 {
            return Err(LtllError::Config(format!(
                "need at least 2 replicates, got {}",
                self.replicates
            )));
        }
        if self.n < 10 {
            return Err(LtllError::Config(format!(
                "sample size must be at least 10, got {}",
                self.n
            )));
        }
        self.prior.validate()?;
        self.mcmc.validate()
    }
}

/// Point estimate and 95% intervals of one method on one replicate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodOutcome {
    pub estimate: [f64; 2],
    pub ci_alpha: Option<Interval>,
    pub ci_beta: Option<Interval>,
}

impl MethodOutcome {
    fn mean_width(&self) -> Option<f64> {
        Some(0.5 * (self.ci_alpha?.width() + self.ci_beta?.width()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicateOutcome {
    pub index: usize,
    pub mle: Option<MethodOutcome>,
    pub bayes: Option<MethodOutcome>,
    pub boundary: bool,
    pub mle_converged: bool,
    pub failures: Vec<String>,
}

pub fn run_replicate(sc: &Scenario, r: usize) -> Result<ReplicateOutcome> {
    if r >= sc.replicates {
        return Err(LtllError::Domain(format!(
            "replicate {r} out of range 0..{}",
            sc.replicates
        )));
    }
    let mut out = ReplicateOutcome {
        index: r,
        mle: None,
        bayes: None,
        boundary: false,
        mle_converged: false,
        failures: Vec::new(),
    };
    let mut rng = RngStream::new(sc.master_seed, r as u64);
    let sample = match draw_ltll(sc.n, &sc.true_params, &mut rng) {
        Ok(s) => s,
        Err(e) => {
            out.failures.push(format!("sampling: {e}"));
            return Ok(out);
        }
    };
    match fit_mle(&sample) {
        Ok(fit) => {
            out.boundary = fit.boundary;
            out.mle_converged = fit.converged;
            if let Some(p) = fit.params() {
                out.mle = Some(MethodOutcome {
                    estimate: [p.alpha(), p.beta()],
                    ci_alpha: fit.ci_alpha,
                    ci_beta: fit.ci_beta,
                });
            }
        }
        Err(e) => out.failures.push(format!("mle: {e}")),
    }
    if sc.run_bayes {
        let cfg = McmcConfig {
            seed: derive_seed(sc.master_seed, r as u64),
            ..sc.mcmc
        };
        match run_chain(&sample, &sc.prior, &cfg) {
            Ok(post) => {
                out.bayes = Some(MethodOutcome {
                    estimate: post.mean,
                    ci_alpha: Some(post.ci_alpha),
                    ci_beta: Some(post.ci_beta),
                })
            }
            Err(e) => out.failures.push(format!("bayes: {e}")),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorMetrics {
    pub mean: f64,
    pub bias: f64,
    pub variance: f64,
    pub rmse: f64,
}

/// Bias, variance (`R − 1` denominator) and `rmse = sqrt(bias² + variance)`.
pub fn error_metrics(estimates: &[f64], truth: f64) -> Result<ErrorMetrics> {
    if estimates.len() < 2 {
        return Err(LtllError::InsufficientData {
            needed: 2,
            got: estimates.len(),
        });
    }
    let r = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / r;
    let variance = estimates.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (r - 1.0);
    let bias = mean - truth;
    Ok(ErrorMetrics {
        mean,
        bias,
        variance,
        rmse: (bias * bias + variance).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamSummary {
    pub metrics: ErrorMetrics,
    /// Interval with the replicate-averaged endpoints.
    pub mean_ci: Option<Interval>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MethodSummary {
    pub alpha: ParamSummary,
    pub beta: ParamSummary,
    pub used: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub x_l: f64,
    pub n: usize,
    pub replicates: usize,
    pub truth: [f64; 2],
    pub mle: Option<MethodSummary>,
    pub bayes: Option<MethodSummary>,
    pub mle_boundary: usize,
    pub mle_failures: usize,
    pub bayes_failures: usize,
    /// Share of replicates with both interval pairs where the mean credible
    /// width is at most the mean Wald width.
    pub credible_narrower_fraction: Option<f64>,
}

fn summarize_method(outcomes: &[&MethodOutcome], truth: [f64; 2]) -> Option<MethodSummary> {
    let column = |k: usize| outcomes.iter().map(|o| o.estimate[k]).collect::<Vec<_>>();
    let mean_ci = |pick: fn(&MethodOutcome) -> Option<Interval>| {
        let cis: Vec<Interval> = outcomes.iter().filter_map(|o| pick(o)).collect();
        (!cis.is_empty()).then(|| {
            let m = cis.len() as f64;
            Interval::new(
                cis.iter().map(|c| c.lower).sum::<f64>() / m,
                cis.iter().map(|c| c.upper).sum::<f64>() / m,
            )
        })
    };
    Some(MethodSummary {
        alpha: ParamSummary {
            metrics: error_metrics(&column(0), truth[0]).ok()?,
            mean_ci: mean_ci(|o| o.ci_alpha),
        },
        beta: ParamSummary {
            metrics: error_metrics(&column(1), truth[1]).ok()?,
            mean_ci: mean_ci(|o| o.ci_beta),
        },
        used: outcomes.len(),
    })
}

/// Aggregates replicate outcomes in index order. Boundary fits carry no
/// MLE estimate and are excluded from the MLE summaries.
pub fn aggregate(sc: &Scenario, outcomes: &[ReplicateOutcome]) -> MetricsReport {
    let mut sorted: Vec<&ReplicateOutcome> = outcomes.iter().collect();
    sorted.sort_by_key(|o| o.index);
    let truth = [sc.true_params.alpha(), sc.true_params.beta()];
    let mle: Vec<&MethodOutcome> = sorted.iter().filter_map(|o| o.mle.as_ref()).collect();
    let bayes: Vec<&MethodOutcome> = sorted.iter().filter_map(|o| o.bayes.as_ref()).collect();
    let paired: Vec<bool> = sorted
        .iter()
        .filter_map(|o| {
            let wald = o.mle.as_ref()?.mean_width()?;
            let cred = o.bayes.as_ref()?.mean_width()?;
            Some(cred <= wald)
        })
        .collect();
    let boundary = sorted.iter().filter(|o| o.boundary).count();
    MetricsReport {
        x_l: sc.true_params.x_l(),
        n: sc.n,
        replicates: sc.replicates,
        truth,
        mle: summarize_method(&mle, truth),
        bayes: if sc.run_bayes {
            summarize_method(&bayes, truth)
        } else {
            None
        },
        mle_boundary: boundary,
        mle_failures: sorted.len() - mle.len() - boundary,
        bayes_failures: if sc.run_bayes {
            sorted.len() - bayes.len()
        } else {
            0
        },
        credible_narrower_fraction: (!paired.is_empty())
            .then(|| paired.iter().filter(|&&b| b).count() as f64 / paired.len() as f64),
    }
}

/// All replicates of one scenario plus their summary.
pub fn simulate(sc: &Scenario, exec: Execution) -> Result<(Vec<ReplicateOutcome>, MetricsReport)> {
    sc.validate()?;
    let outcomes = exec
        .map(sc.replicates, |r| run_replicate(sc, r))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let report = aggregate(sc, &outcomes);
    Ok((outcomes, report))
}

pub const DEFAULT_TRUNCATIONS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 1.0];
pub const DEFAULT_SAMPLE_SIZES: [usize; 4] = [50, 100, 500, 1000];

pub fn truncation_sweep(
    base: &Scenario,
    x_ls: &[f64],
    exec: Execution,
) -> Result<Vec<MetricsReport>> {
    x_ls.iter()
        .map(|&x_l| {
            let sc = Scenario {
                true_params: base.true_params.with_truncation(x_l)?,
                ..*base
            };
            Ok(simulate(&sc, exec)?.1)
        })
        .collect()
}

pub fn sample_size_sweep(
    base: &Scenario,
    ns: &[usize],
    exec: Execution,
) -> Result<Vec<MetricsReport>> {
    ns.iter()
        .map(|&n| Ok(simulate(&Scenario { n, ..*base }, exec)?.1))
        .collect()
}
