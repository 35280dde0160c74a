//! Bayesian inference for `(α, β)` under independent Gamma priors.
//!
//! The posterior is sampled with a Metropolis–Hastings random walk on
//! `(ln α, ln β)`. Summaries are computed from the retained draws.

mod ess;
mod kde;

pub use ess::effective_sample_size;
pub use kde::{kde_grid, DensityGrid, GridSpec};

use serde::{Deserialize, Serialize};

use crate::dist::{existence_stats, log_likelihood_ln, Sample};
use crate::error::{LtllError, Result};
use crate::exec::Execution;
use crate::mle::{fit_mle, level_set_ellipse, EllipsePoints};
use crate::numerics::{ln_gamma, quantile_sorted, Interval, RngStream, SymMatrix2};

/// Independent `Gamma(a1, b1)` on α and `Gamma(a2, b2)` on β, rate parameterization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec {
    pub a1: f64,
    pub b1: f64,
    pub a2: f64,
    pub b2: f64,
}

impl Default for PriorSpec {
    fn default() -> Self {
        Self {
            a1: 0.01,
            b1: 0.01,
            a2: 0.01,
            b2: 0.01,
        }
    }
}

impl PriorSpec {
    pub fn new(a1: f64, b1: f64, a2: f64, b2: f64) -> Result<Self> {
        let p = Self { a1, b1, a2, b2 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("a1", self.a1),
            ("b1", self.b1),
            ("a2", self.a2),
            ("b2", self.b2),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(LtllError::Domain(format!(
                    "prior hyperparameter {name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Shape of the β prior under its marginal-kernel name.
    pub fn c(&self) -> f64 {
        self.a2
    }

    pub fn d(&self) -> f64 {
        self.b2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct McmcConfig {
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub step_alpha: f64,
    pub step_beta: f64,
    pub adapt: bool,
    pub seed: u64,
    pub chains: usize,
}

impl Default for McmcConfig {
    fn default() -> Self {
        Self {
            iterations: 20_000,
            burn_in: 5_000,
            thin: 5,
            step_alpha: 0.1,
            step_beta: 0.1,
            adapt: true,
            seed: 20_240_601,
            chains: 1,
        }
    }
}

impl McmcConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(LtllError::Config(msg));
        if self.iterations <= self.burn_in {
            return bad(format!(
                "iterations ({}) must exceed burn_in ({})",
                self.iterations, self.burn_in
            ));
        }
        if self.thin == 0 {
            return bad("thin must be at least 1".into());
        }
        if self.chains == 0 {
            return bad("chains must be at least 1".into());
        }
        if !(self.step_alpha >= 0.0 && self.step_beta >= 0.0)
            || !self.step_alpha.is_finite()
            || !self.step_beta.is_finite()
        {
            return bad("proposal steps must be finite and non-negative".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PosteriorResult {
    pub draws: Vec<[f64; 2]>,
    pub acceptance_rate: f64,
    pub mean: [f64; 2],
    pub median: [f64; 2],
    pub ci_alpha: Interval,
    pub ci_beta: Interval,
    pub cov: SymMatrix2,
    pub ess_alpha: f64,
    pub ess_beta: f64,
    /// Proposal steps in force after burn-in, one pair per chain.
    pub final_steps: Vec<[f64; 2]>,
}

pub fn log_prior(alpha: f64, beta: f64, prior: &PriorSpec) -> f64 {
    if !(alpha > 0.0 && beta > 0.0) {
        return f64::NEG_INFINITY;
    }
    gamma_ln_pdf(alpha, prior.a1, prior.b1) + gamma_ln_pdf(beta, prior.a2, prior.b2)
}

fn gamma_ln_pdf(x: f64, shape: f64, rate: f64) -> f64 {
    let norm = ln_gamma(shape).expect("validated shape is positive");
    (shape - 1.0) * x.ln() - rate * x + shape * rate.ln() - norm
}

/// Unnormalized log posterior; `−∞` outside the support.
pub fn log_posterior(s: &Sample, alpha: f64, beta: f64, prior: &PriorSpec) -> f64 {
    if !(alpha > 0.0 && beta > 0.0) || !alpha.is_finite() || !beta.is_finite() {
        return f64::NEG_INFINITY;
    }
    let lp = log_likelihood_ln(s, alpha.ln(), beta) + log_prior(alpha, beta, prior);
    if lp.is_nan() {
        f64::NEG_INFINITY
    } else {
        lp
    }
}

/// Current position of a chain with its cached log posterior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainState {
    pub theta: [f64; 2],
    pub log_post: f64,
}

impl ChainState {
    pub fn new(theta: [f64; 2], s: &Sample, prior: &PriorSpec) -> Self {
        Self {
            theta,
            log_post: log_posterior(s, theta[0], theta[1], prior),
        }
    }
}

/// Accept with probability `min(1, exp(log_ratio))` using one uniform draw.
pub fn metropolis_accept(log_ratio: f64, rng: &mut RngStream) -> bool {
    if log_ratio.is_nan() {
        return false;
    }
    rng.draw_uniform().ln() < log_ratio
}

/// One log-space random-walk step. The ratio carries the Jacobian
/// `ln α* + ln β* − ln α − ln β` of the proposal.
pub fn mh_step(
    state: &ChainState,
    s: &Sample,
    prior: &PriorSpec,
    steps: [f64; 2],
    rng: &mut RngStream,
) -> (ChainState, bool) {
    let [a, b] = state.theta;
    let la = a.ln() + steps[0] * rng.draw_std_normal();
    let lb = b.ln() + steps[1] * rng.draw_std_normal();
    let proposal = [la.exp(), lb.exp()];
    let log_post = log_posterior(s, proposal[0], proposal[1], prior);
    let log_ratio = log_post - state.log_post + (la + lb) - (a.ln() + b.ln());
    if metropolis_accept(log_ratio, rng) {
        (
            ChainState {
                theta: proposal,
                log_post,
            },
            true,
        )
    } else {
        (*state, false)
    }
}

struct ChainOutput {
    draws: Vec<[f64; 2]>,
    accepted: usize,
    steps: [f64; 2],
}

fn initial_point(s: &Sample) -> Result<[f64; 2]> {
    let fit = fit_mle(s)?;
    if let Some(p) = fit.params() {
        return Ok([p.alpha(), p.beta()]);
    }
    let beta0 = existence_stats(s)?.beta0;
    Ok([s.median(), beta0])
}

fn single_chain(
    s: &Sample,
    prior: &PriorSpec,
    cfg: &McmcConfig,
    start: [f64; 2],
    stream: u64,
) -> ChainOutput {
    let mut rng = RngStream::new(cfg.seed, stream);
    let mut state = ChainState::new(start, s, prior);
    let mut steps = [cfg.step_alpha, cfg.step_beta];
    let mut draws = Vec::with_capacity((cfg.iterations - cfg.burn_in) / cfg.thin + 1);
    let mut accepted = 0;
    let mut window = 0;
    for it in 0..cfg.iterations {
        let (next, acc) = mh_step(&state, s, prior, steps, &mut rng);
        state = next;
        if it < cfg.burn_in {
            window += acc as usize;
            if cfg.adapt && (it + 1) % 100 == 0 {
                let rate = window as f64 / 100.0;
                if rate < 0.2 {
                    steps = [steps[0] / 1.1, steps[1] / 1.1];
                } else if rate > 0.5 {
                    steps = [steps[0] * 1.1, steps[1] * 1.1];
                }
                window = 0;
            }
            continue;
        }
        accepted += acc as usize;
        if (it - cfg.burn_in).is_multiple_of(cfg.thin) {
            draws.push(state.theta);
        }
    }
    ChainOutput {
        draws,
        accepted,
        steps,
    }
}

pub fn run_chain(s: &Sample, prior: &PriorSpec, cfg: &McmcConfig) -> Result<PosteriorResult> {
    run_chain_with(s, prior, cfg, Execution::Sequential)
}

/// Runs `cfg.chains` chains, chain `k` on RNG stream `k` of `cfg.seed`, and pools the draws.
pub fn run_chain_with(
    s: &Sample,
    prior: &PriorSpec,
    cfg: &McmcConfig,
    exec: Execution,
) -> Result<PosteriorResult> {
    cfg.validate()?;
    prior.validate()?;
    let start = initial_point(s)?;
    let chains = exec.map(cfg.chains, |k| single_chain(s, prior, cfg, start, k as u64));
    let post_burn = (cfg.iterations - cfg.burn_in) * cfg.chains;
    let accepted: usize = chains.iter().map(|c| c.accepted).sum();
    let ess = |k: usize| {
        chains
            .iter()
            .map(|c| effective_sample_size(&c.draws.iter().map(|d| d[k]).collect::<Vec<_>>()))
            .sum::<f64>()
    };
    let (ess_alpha, ess_beta) = (ess(0), ess(1));
    let final_steps = chains.iter().map(|c| c.steps).collect();
    let draws: Vec<[f64; 2]> = chains.into_iter().flat_map(|c| c.draws).collect();
    summarize(
        draws,
        accepted as f64 / post_burn as f64,
        ess_alpha,
        ess_beta,
        final_steps,
    )
}

fn summarize(
    draws: Vec<[f64; 2]>,
    acceptance_rate: f64,
    ess_alpha: f64,
    ess_beta: f64,
    final_steps: Vec<[f64; 2]>,
) -> Result<PosteriorResult> {
    if draws.len() < 2 {
        return Err(LtllError::InsufficientData {
            needed: 2,
            got: draws.len(),
        });
    }
    let n = draws.len() as f64;
    let mean = [
        draws.iter().map(|d| d[0]).sum::<f64>() / n,
        draws.iter().map(|d| d[1]).sum::<f64>() / n,
    ];
    let (mut saa, mut sab, mut sbb) = (0.0, 0.0, 0.0);
    for d in &draws {
        let (x, y) = (d[0] - mean[0], d[1] - mean[1]);
        saa += x * x;
        sab += x * y;
        sbb += y * y;
    }
    let cov = SymMatrix2::new(saa / (n - 1.0), sab / (n - 1.0), sbb / (n - 1.0));
    let sorted_a = sorted_coord(&draws, 0);
    let sorted_b = sorted_coord(&draws, 1);
    Ok(PosteriorResult {
        acceptance_rate,
        mean,
        median: [
            quantile_sorted(&sorted_a, 0.5),
            quantile_sorted(&sorted_b, 0.5),
        ],
        ci_alpha: quantile_interval(&sorted_a, 0.05),
        ci_beta: quantile_interval(&sorted_b, 0.05),
        cov,
        ess_alpha,
        ess_beta,
        final_steps,
        draws,
    })
}

fn sorted_coord(draws: &[[f64; 2]], k: usize) -> Vec<f64> {
    let mut v: Vec<f64> = draws.iter().map(|d| d[k]).collect();
    v.sort_by(f64::total_cmp);
    v
}

fn quantile_interval(sorted: &[f64], gamma: f64) -> Interval {
    Interval::new(
        quantile_sorted(sorted, gamma / 2.0),
        quantile_sorted(sorted, 1.0 - gamma / 2.0),
    )
}

/// Equal-tailed credible intervals; quantiles interpolate linearly between
/// order statistics at position `p (n − 1)`.
pub fn credible_intervals(res: &PosteriorResult, gamma: f64) -> Result<(Interval, Interval)> {
    credible_intervals_of(&res.draws, gamma)
}

pub fn credible_intervals_of(draws: &[[f64; 2]], gamma: f64) -> Result<(Interval, Interval)> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(LtllError::Domain(format!(
            "gamma must lie in (0, 1), got {gamma}"
        )));
    }
    if draws.len() < 100 {
        return Err(LtllError::InsufficientData {
            needed: 100,
            got: draws.len(),
        });
    }
    Ok((
        quantile_interval(&sorted_coord(draws, 0), gamma),
        quantile_interval(&sorted_coord(draws, 1), gamma),
    ))
}

/// Ellipse `(θ − mean)ᵀ Σ⁻¹ (θ − mean) = χ²₂(1 − γ)` from the posterior covariance.
pub fn credible_ellipse(
    res: &PosteriorResult,
    gamma: f64,
    n_points: usize,
) -> Result<EllipsePoints> {
    credible_ellipse_from(res.mean, &res.cov, gamma, n_points)
}

pub fn credible_ellipse_from(
    mean: [f64; 2],
    cov: &SymMatrix2,
    gamma: f64,
    n_points: usize,
) -> Result<EllipsePoints> {
    let precision = cov.inverse().filter(|_| cov.is_positive_definite()).ok_or(
        LtllError::NotPositiveDefinite {
            a11: cov.a11,
            a12: cov.a12,
            a22: cov.a22,
        },
    )?;
    level_set_ellipse(mean, &precision, gamma, n_points)
}

/// Log of the marginal β kernel `β^{N+c−1} exp[−dβ − Σ ln(1 + X_i^β)]`
/// for observations `x` in units of the truncation point. An empty slice
/// leaves the Gamma(c, d) prior kernel.
pub fn marginal_beta_log_kernel(x: &[f64], beta: f64, prior: &PriorSpec) -> f64 {
    if !(beta > 0.0) {
        return f64::NEG_INFINITY;
    }
    let n = x.len() as f64;
    let tail: f64 = x
        .iter()
        .map(|xi| crate::numerics::softplus(beta * xi.ln()))
        .sum();
    (n + prior.c() - 1.0) * beta.ln() - prior.d() * beta - tail
}

/// Kernel density estimate of the retained draws on a grid.
pub fn posterior_density_grid(res: &PosteriorResult, grid: &GridSpec) -> Result<DensityGrid> {
    if res.draws.len() < 100 {
        return Err(LtllError::InsufficientData {
            needed: 100,
            got: res.draws.len(),
        });
    }
    kde_grid(&res.draws, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{draw_ltll, log_likelihood, LtllParams};
    use approx::assert_relative_eq;

    fn synthetic(n: usize, xl: f64, seed: u64) -> Sample {
        draw_ltll(
            n,
            &LtllParams::new(2.0, 3.0, xl).unwrap(),
            &mut RngStream::new(seed, 0),
        )
        .unwrap()
    }

    fn short_cfg(seed: u64) -> McmcConfig {
        McmcConfig {
            iterations: 6000,
            burn_in: 1000,
            thin: 2,
            seed,
            ..Default::default()
        }
    }

    #[test]
    fn prior_values() {
        let unit = PriorSpec::new(1.0, 1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(log_prior(2.0, 3.0, &unit), -5.0, epsilon = 1e-12);
        assert_eq!(log_prior(0.0, 3.0, &unit), f64::NEG_INFINITY);
        let shape2 = PriorSpec::new(2.0, 1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(log_prior(1.0, 1.0, &shape2) - (-1.0), -1.0, epsilon = 1e-12);
        assert!(PriorSpec::new(0.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn posterior_is_likelihood_plus_prior() {
        let s = Sample::new(vec![1.5, 2.0, 3.5, 7.0], 1.0).unwrap();
        let flat = PriorSpec::new(1.0, 1e-6, 1.0, 1e-6).unwrap();
        let offsets: Vec<f64> = [(1.0, 1.0), (2.0, 3.0), (5.0, 0.5)]
            .iter()
            .map(|&(a, b)| {
                log_posterior(&s, a, b, &flat) - log_likelihood(&s, a, b).unwrap() + 1e-6 * (a + b)
            })
            .collect();
        assert_relative_eq!(offsets[0], offsets[1], epsilon = 1e-9);
        assert_relative_eq!(offsets[0], offsets[2], epsilon = 1e-9);

        let other = PriorSpec { a1: 3.0, ..flat };
        let d_post = log_posterior(&s, 2.0, 3.0, &other) - log_posterior(&s, 2.0, 3.0, &flat);
        let d_prior = log_prior(2.0, 3.0, &other) - log_prior(2.0, 3.0, &flat);
        assert_relative_eq!(d_post, d_prior, epsilon = 1e-10);
        assert_eq!(log_posterior(&s, -1.0, 3.0, &flat), f64::NEG_INFINITY);
    }

    #[test]
    fn better_proposals_always_accepted() {
        let mut rng = RngStream::new(5, 0);
        assert!((0..10_000).all(|_| metropolis_accept(0.0, &mut rng)));
        assert!((0..10_000).all(|_| metropolis_accept(1e-9, &mut rng)));
        assert!(!metropolis_accept(f64::NEG_INFINITY, &mut rng));
    }

    #[test]
    fn zero_steps_never_move() {
        let s = synthetic(50, 1.0, 1);
        let cfg = McmcConfig {
            step_alpha: 0.0,
            step_beta: 0.0,
            adapt: false,
            ..short_cfg(3)
        };
        let res = run_chain(&s, &PriorSpec::default(), &cfg).unwrap();
        assert_eq!(res.acceptance_rate, 1.0);
        assert!(res.draws.iter().all(|d| *d == res.draws[0]));
    }

    #[test]
    fn two_state_stationary_frequencies() {
        // target π ∝ (1, 3) with a symmetric flip proposal
        let log_target = [0.0_f64, 3.0_f64.ln()];
        let mut rng = RngStream::new(11, 0);
        let mut state = 0usize;
        let mut visits = [0usize; 2];
        let mut moves = [[0usize; 2]; 2];
        let steps = 1_000_000;
        for _ in 0..steps {
            let proposal = 1 - state;
            let next = if metropolis_accept(log_target[proposal] - log_target[state], &mut rng) {
                proposal
            } else {
                state
            };
            moves[state][next] += 1;
            state = next;
            visits[state] += 1;
        }
        assert!((visits[1] as f64 / steps as f64 - 0.75).abs() < 0.005);
        // P(0→1) = 1 and P(1→0) = 1/3
        let p10 = moves[1][0] as f64 / (moves[1][0] + moves[1][1]) as f64;
        assert!((p10 - 1.0 / 3.0).abs() < 0.005, "{p10}");
        assert_eq!(moves[0][0], 0);
    }

    #[test]
    fn deterministic_given_seed() {
        let s = synthetic(200, 1.0, 2);
        let a = run_chain(&s, &PriorSpec::default(), &short_cfg(9)).unwrap();
        let b = run_chain(&s, &PriorSpec::default(), &short_cfg(9)).unwrap();
        assert_eq!(a, b);
        let c = run_chain(&s, &PriorSpec::default(), &short_cfg(10)).unwrap();
        assert_ne!(a.draws, c.draws);
    }

    #[test]
    fn summaries_are_consistent() {
        let s = synthetic(300, 1.0, 6);
        let res = run_chain(&s, &PriorSpec::default(), &short_cfg(4)).unwrap();
        assert!(res.acceptance_rate > 0.0 && res.acceptance_rate < 1.0);
        assert_eq!(res.draws.len(), 2500);
        for k in 0..2 {
            let lo = res.draws.iter().map(|d| d[k]).fold(f64::INFINITY, f64::min);
            let hi = res
                .draws
                .iter()
                .map(|d| d[k])
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(lo <= res.mean[k] && res.mean[k] <= hi);
        }
        assert!(res.ci_alpha.contains(res.mean[0]) && res.ci_beta.contains(res.mean[1]));
        assert!(res.cov.is_positive_definite());
        let (ca, cb) = credible_intervals(&res, 0.05).unwrap();
        assert_eq!(ca, res.ci_alpha);
        assert_eq!(cb, res.ci_beta);
    }

    #[test]
    fn prior_dominates_with_huge_rate() {
        let s = Sample::new(vec![1.2, 1.9, 2.4, 3.3, 6.0], 1.0).unwrap();
        let cfg = McmcConfig {
            iterations: 30_000,
            burn_in: 5_000,
            ..short_cfg(8)
        };
        // near β = 0 the likelihood behaves like β^n, so the β mean is (a2 + n) / b2
        let prior = PriorSpec::new(2.0, 1e4, 3.0, 1e4).unwrap();
        let res = run_chain(&s, &prior, &cfg).unwrap();
        assert!((res.mean[0] / 2e-4 - 1.0).abs() < 0.1, "{:?}", res.mean);
        assert!((res.mean[1] / 8e-4 - 1.0).abs() < 0.1, "{:?}", res.mean);
        let prior = PriorSpec::new(2.0, 1e4, 200.0, 1e4).unwrap();
        let res = run_chain(&s, &prior, &cfg).unwrap();
        assert!((res.mean[1] / 2e-2 - 1.0).abs() < 0.1, "{:?}", res.mean);
    }

    #[test]
    fn credible_interval_arithmetic() {
        let draws: Vec<[f64; 2]> = (1..=100).map(|i| [i as f64, 0.0]).collect();
        let (a, _) = credible_intervals_of(&draws, 0.05).unwrap();
        assert_relative_eq!(a.lower, 3.475, epsilon = 1e-12);
        assert_relative_eq!(a.upper, 97.525, epsilon = 1e-12);
        assert!(credible_intervals_of(&draws[..99], 0.05).is_err());
    }

    #[test]
    fn ellipse_from_unit_covariance_is_circle() {
        let e = credible_ellipse_from([0.0, 0.0], &SymMatrix2::IDENTITY, 0.05, 32).unwrap();
        for p in &e.points {
            assert_relative_eq!(
                p[0].hypot(p[1]),
                5.991_464_547_107_98_f64.sqrt(),
                epsilon = 1e-9
            );
        }
        let singular = SymMatrix2::new(1.0, 1.0, 1.0);
        assert!(credible_ellipse_from([0.0, 0.0], &singular, 0.05, 32).is_err());
    }

    #[test]
    fn gaussian_draws_ellipse_coverage() {
        let mut rng = RngStream::new(12, 0);
        let draws: Vec<[f64; 2]> = (0..4000)
            .map(|_| {
                let (z1, z2) = (rng.draw_std_normal(), rng.draw_std_normal());
                [1.0 + 0.5 * z1, 2.0 + 0.3 * z1 + 0.4 * z2]
            })
            .collect();
        let res = summarize(draws, 0.5, 0.0, 0.0, vec![]).unwrap();
        let e = credible_ellipse(&res, 0.05, 64).unwrap();
        let inside = res.draws.iter().filter(|d| e.contains(**d)).count() as f64 / 4000.0;
        assert!((0.91..=0.99).contains(&inside), "{inside}");
    }

    #[test]
    fn marginal_kernel_without_data_is_gamma() {
        let prior = PriorSpec::new(1.0, 1.0, 2.5, 0.7).unwrap();
        for b in [0.3, 1.0, 4.0] {
            let expected = 1.5 * f64::ln(b) - 0.7 * b;
            assert_relative_eq!(
                marginal_beta_log_kernel(&[], b, &prior),
                expected,
                epsilon = 1e-12
            );
        }
        assert_eq!(
            marginal_beta_log_kernel(&[2.0], 0.0, &prior),
            f64::NEG_INFINITY
        );
    }

    #[test]
    fn posterior_grid_requires_draws() {
        let res = summarize(vec![[1.0, 1.0], [1.1, 1.2]], 0.5, 2.0, 2.0, vec![]).unwrap();
        let grid = GridSpec {
            alpha: (0.0, 2.0),
            beta: (0.0, 2.0),
            n_alpha: 10,
            n_beta: 10,
        };
        assert!(posterior_density_grid(&res, &grid).is_err());
    }
}
