//! Maximum-likelihood estimation of `(α, β)` for a known truncation point.
//!
//! Data are first expressed in units of the truncation point. The existence
//! statistics then decide between an interior fit (simplex search over
//! `(ln α, ln β)` from several starts, polished with Newton steps on the
//! analytic score) and the Pareto boundary solution `β̂ = β₀`, where the
//! scale is not identified.

mod ellipse;
mod simplex;

pub use ellipse::{level_set_ellipse, EllipsePoints};
pub use simplex::{nelder_mead, SimplexOptions, SimplexResult};

use serde::{Deserialize, Serialize};

use crate::dist::{
    existence_stats, log_likelihood, log_likelihood_ln, score_gradient, score_gradient_ln,
    ExistenceStats, LtllParams, Sample,
};
use crate::error::{LtllError, Result};
use crate::numerics::{
    finite_diff_hessian, finite_diff_jacobian, normal_quantile, Interval, SymMatrix2,
};

/// Point estimate: interior, or the Pareto degeneration at the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MleEstimate {
    Interior(LtllParams),
    /// `λ → 0`: density `β x_L^β x^{−β−1}` on `x > x_L`.
    Pareto {
        beta: f64,
        x_l: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MleFit {
    pub estimate: MleEstimate,
    pub boundary: bool,
    /// `None` for untruncated data.
    pub existence: Option<ExistenceStats>,
    pub loglik: f64,
    pub n: usize,
    /// Observed information `−∇²ℓ` in `(α, β)` at the estimate.
    pub info: Option<SymMatrix2>,
    pub info_positive_definite: bool,
    pub ci_alpha: Option<Interval>,
    pub ci_beta: Option<Interval>,
    pub converged: bool,
    pub iterations: usize,
}

impl MleFit {
    pub fn alpha(&self) -> Option<f64> {
        match self.estimate {
            MleEstimate::Interior(p) => Some(p.alpha()),
            MleEstimate::Pareto { .. } => None,
        }
    }

    pub fn beta(&self) -> f64 {
        match self.estimate {
            MleEstimate::Interior(p) => p.beta(),
            MleEstimate::Pareto { beta, .. } => beta,
        }
    }

    pub fn params(&self) -> Option<LtllParams> {
        match self.estimate {
            MleEstimate::Interior(p) => Some(p),
            MleEstimate::Pareto { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MleOptions {
    pub simplex: SimplexOptions,
    /// Confidence level parameter for the Wald intervals stored on the fit.
    pub gamma: f64,
    pub newton_steps: usize,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self {
            simplex: SimplexOptions::default(),
            gamma: 0.05,
            newton_steps: 25,
        }
    }
}

pub fn fit_mle(s: &Sample) -> Result<MleFit> {
    fit_mle_with(s, &MleOptions::default())
}

pub fn fit_mle_with(s: &Sample, opts: &MleOptions) -> Result<MleFit> {
    if !s.has_two_distinct() {
        return Err(LtllError::DegenerateSample(
            "maximum likelihood needs at least two distinct values".into(),
        ));
    }
    let n = s.len();
    let (unit, existence) = if s.x_l() > 0.0 {
        (s.x_l(), Some(existence_stats(s)?))
    } else {
        (s.geometric_mean(), None)
    };
    if let Some(ex) = existence.filter(|e| !e.interior()) {
        return Ok(pareto_fit(s, ex));
    }
    let scaled = s.rescaled(unit)?;
    let starts = starting_points(&scaled, existence.as_ref());

    let objective = |u: [f64; 2]| -log_likelihood_ln(&scaled, u[0], u[1].exp());
    let mut best: Option<(SimplexResult, usize)> = None;
    let mut total_iterations = 0;
    for (a0, b0) in starts {
        let run = nelder_mead(objective, [a0.ln(), b0.ln()], &opts.simplex);
        total_iterations += run.iterations;
        if best.as_ref().is_none_or(|(b, _)| run.fx < b.fx) {
            best = Some((run, total_iterations));
        }
    }
    let (run, _) = best.expect("at least one start");
    if !run.fx.is_finite() {
        return Err(LtllError::NotAvailable(
            "likelihood is not finite at any start".into(),
        ));
    }
    let (polished, stationary) = newton_polish(&scaled, run.x, opts.newton_steps);

    let alpha = unit * polished[0].exp();
    let beta = polished[1].exp();
    let params = LtllParams::new(alpha, beta, s.x_l())?;
    let loglik = log_likelihood(s, alpha, beta)?;
    let info = observed_information(s, [alpha, beta]).ok();
    let info_pd = info.is_some_and(|m| m.is_positive_definite());
    let (ci_alpha, ci_beta) = match info.filter(|_| info_pd) {
        Some(m) => {
            let (a, b) = wald_intervals_from([alpha, beta], &m, opts.gamma)?;
            (Some(a), Some(b))
        }
        None => (None, None),
    };
    Ok(MleFit {
        estimate: MleEstimate::Interior(params),
        boundary: false,
        existence,
        loglik,
        n,
        info,
        info_positive_definite: info_pd,
        ci_alpha,
        ci_beta,
        converged: run.converged || stationary,
        iterations: total_iterations,
    })
}

fn pareto_fit(s: &Sample, ex: ExistenceStats) -> MleFit {
    let n = s.len() as f64;
    let beta = ex.beta0;
    let loglik = n * beta.ln() + n * beta * s.x_l().ln() - (beta + 1.0) * s.sum_ln();
    MleFit {
        estimate: MleEstimate::Pareto { beta, x_l: s.x_l() },
        boundary: true,
        existence: Some(ex),
        loglik,
        n: s.len(),
        info: None,
        info_positive_definite: false,
        ci_alpha: None,
        ci_beta: None,
        converged: true,
        iterations: 0,
    }
}

fn starting_points(scaled: &Sample, ex: Option<&ExistenceStats>) -> Vec<(f64, f64)> {
    let median = scaled.median();
    let geo = scaled.geometric_mean();
    match ex {
        Some(e) => vec![
            (median, e.beta0),
            (geo, 1.5 * e.beta0),
            (median, 1.2 * e.beta_c),
        ],
        None => {
            // logistic scale of ln x is π / (β √3)
            let n = scaled.len() as f64;
            let mean_ln = scaled.sum_ln() / n;
            let var_ln = scaled
                .ln_values()
                .iter()
                .map(|l| (l - mean_ln).powi(2))
                .sum::<f64>()
                / (n - 1.0);
            let guess = std::f64::consts::PI / (3.0 * var_ln).sqrt();
            vec![(median, guess), (geo, 1.5 * guess), (median, 0.8 * guess)]
        }
    }
}

/// Newton iterations on the score in `(ln α, ln β)` coordinates with a
/// backtracking guard. Returns the point and whether the score vanished.
fn newton_polish(s: &Sample, start: [f64; 2], max_steps: usize) -> ([f64; 2], bool) {
    let value = |u: [f64; 2]| log_likelihood_ln(s, u[0], u[1].exp());
    let grad = |u: [f64; 2]| {
        let beta = u[1].exp();
        let g = score_gradient_ln(s, u[0], beta);
        [g[0] * u[0].exp(), g[1] * beta]
    };
    let mut u = start;
    let mut f = value(u);
    let tol = |f: f64| 1e-9 * (1.0 + f.abs());
    for _ in 0..max_steps {
        let g = grad(u);
        if g[0].hypot(g[1]) < tol(f) {
            return (u, true);
        }
        let Ok(h) = finite_diff_jacobian(grad, u, Some([1e-6, 1e-6])) else {
            break;
        };
        // ascent needs a negative-definite Hessian
        let Some(inv) = h
            .scale(-1.0)
            .inverse()
            .filter(|_| h.scale(-1.0).is_positive_definite())
        else {
            break;
        };
        let step = inv.mul_vec(g);
        let mut t = 1.0;
        let mut moved = false;
        while t > 1e-6 {
            let cand = [u[0] + t * step[0], u[1] + t * step[1]];
            let fc = value(cand);
            if fc.is_finite() && fc >= f - 1e-12 * f.abs() {
                u = cand;
                f = fc;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
    }
    let g = grad(u);
    (u, g[0].hypot(g[1]) < tol(f))
}

/// Observed information `−∇²ℓ(θ)` by central differences of the log-likelihood.
/// Positive-definiteness is not enforced; callers check it.
pub fn observed_information(s: &Sample, theta: [f64; 2]) -> Result<SymMatrix2> {
    observed_information_of(|t| log_likelihood(s, t[0], t[1]).unwrap_or(f64::NAN), theta)
}

/// Observed information of an arbitrary log-likelihood surface.
pub fn observed_information_of<F>(loglik: F, theta: [f64; 2]) -> Result<SymMatrix2>
where
    F: Fn([f64; 2]) -> f64,
{
    Ok(finite_diff_hessian(loglik, theta, None)?.scale(-1.0))
}

/// Wald intervals `θ̂_i ± z_{1−γ/2} sqrt((J⁻¹)_ii)`, lower ends clipped to stay positive.
pub fn wald_intervals(fit: &MleFit, gamma: f64) -> Result<(Interval, Interval)> {
    let params = fit.params().ok_or_else(|| {
        LtllError::NotAvailable("Wald intervals do not exist for a Pareto boundary fit".into())
    })?;
    let info = fit
        .info
        .filter(|_| fit.info_positive_definite)
        .ok_or_else(|| {
            LtllError::NotAvailable("observed information is not positive definite".into())
        })?;
    wald_intervals_from([params.alpha(), params.beta()], &info, gamma)
}

pub fn wald_intervals_from(
    center: [f64; 2],
    info: &SymMatrix2,
    gamma: f64,
) -> Result<(Interval, Interval)> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(LtllError::Domain(format!(
            "gamma must lie in (0, 1), got {gamma}"
        )));
    }
    if !info.is_positive_definite() {
        return Err(LtllError::NotPositiveDefinite {
            a11: info.a11,
            a12: info.a12,
            a22: info.a22,
        });
    }
    let cov = info
        .inverse()
        .expect("positive definite matrix is invertible");
    let z = normal_quantile(1.0 - gamma / 2.0)?;
    let interval = |c: f64, var: f64| {
        let half = z * var.sqrt();
        Interval::new((c - half).max(f64::MIN_POSITIVE), c + half)
    };
    Ok((interval(center[0], cov.a11), interval(center[1], cov.a22)))
}

/// Wald confidence ellipse `(θ − θ̂)ᵀ J (θ − θ̂) = χ²₂(1 − γ)` with the
/// full-sample observed information `J`.
pub fn confidence_ellipse(fit: &MleFit, gamma: f64, n_points: usize) -> Result<EllipsePoints> {
    let params = fit.params().ok_or_else(|| {
        LtllError::NotAvailable("the fit degenerates to a Pareto law; no confidence ellipse".into())
    })?;
    let info = fit
        .info
        .ok_or_else(|| LtllError::NotAvailable("observed information unavailable".into()))?;
    level_set_ellipse([params.alpha(), params.beta()], &info, gamma, n_points)
}

/// Norm of the analytic score at an interior fit, in original units.
pub fn score_norm(s: &Sample, fit: &MleFit) -> Option<f64> {
    let p = fit.params()?;
    let g = score_gradient(s, p.alpha(), p.beta()).ok()?;
    Some(g[0].hypot(g[1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::draw_ltll;
    use crate::numerics::{finite_diff_gradient, RngStream};
    use approx::assert_relative_eq;

    fn synthetic(n: usize, a: f64, b: f64, xl: f64, seed: u64) -> Sample {
        draw_ltll(
            n,
            &LtllParams::new(a, b, xl).unwrap(),
            &mut RngStream::new(seed, 0),
        )
        .unwrap()
    }

    #[test]
    fn two_point_sample_is_interior() {
        let s = Sample::new(vec![2.0, 4.0], 1.0).unwrap();
        let fit = fit_mle(&s).unwrap();
        assert!(!fit.boundary);
        let g = score_norm(&s, &fit).unwrap();
        assert!(g < 1e-5 * (1.0 + fit.loglik.abs()), "score {g}");
    }

    #[test]
    fn recovers_truth_at_large_n() {
        let s = synthetic(1000, 2.0, 3.0, 1.0, 42);
        let fit = fit_mle(&s).unwrap();
        assert!(fit.converged);
        // sd of beta-hat is about 0.12 at this n
        assert!((fit.alpha().unwrap() - 2.0).abs() < 0.15);
        assert!((fit.beta() - 3.0).abs() < 0.45);
        assert!(fit.info_positive_definite);
    }

    #[test]
    fn boundary_sample_gives_pareto() {
        let mut values = vec![1.01; 9];
        values.push(1e6);
        let s = Sample::new(values, 1.0).unwrap();
        let fit = fit_mle(&s).unwrap();
        assert!(fit.boundary);
        assert_eq!(fit.alpha(), None);
        assert_relative_eq!(fit.beta(), fit.existence.unwrap().beta0);
        assert!(wald_intervals(&fit, 0.05).is_err());
        assert!(confidence_ellipse(&fit, 0.05, 64).is_err());
    }

    #[test]
    fn degenerate_sample_rejected() {
        let s = Sample::new(vec![3.0, 3.0, 3.0], 1.0).unwrap();
        assert!(matches!(fit_mle(&s), Err(LtllError::DegenerateSample(_))));
    }

    #[test]
    fn hessian_of_loglik_matches_jacobian_of_score() {
        let s = Sample::new(vec![2.0, 3.0, 5.0], 1.0).unwrap();
        let fit = fit_mle(&s).unwrap();
        let p = fit.params().unwrap();
        let theta = [p.alpha(), p.beta()];
        let nll_hess =
            finite_diff_hessian(|t| -log_likelihood(&s, t[0], t[1]).unwrap(), theta, None).unwrap();
        // differentiate each score component on its own
        let jac = [0, 1].map(|k| {
            finite_diff_gradient(|t| -score_gradient(&s, t[0], t[1]).unwrap()[k], theta, None)
                .unwrap()
        });
        assert_relative_eq!(nll_hess.a11, jac[0][0], max_relative = 1e-4);
        assert_relative_eq!(nll_hess.a22, jac[1][1], max_relative = 1e-4);
        assert_relative_eq!(nll_hess.a12, jac[0][1], max_relative = 1e-4);
        assert_relative_eq!(nll_hess.a12, jac[1][0], max_relative = 1e-4);
    }

    #[test]
    fn quadratic_surrogate_information() {
        let curvature = SymMatrix2::new(7.0, -2.0, 3.0);
        let center = [1.5, 0.4];
        let ll = |t: [f64; 2]| -0.5 * curvature.quad_form([t[0] - center[0], t[1] - center[1]]);
        let info = observed_information_of(ll, [1.2, 0.9]).unwrap();
        assert!((info.a11 - 7.0).abs() < 1e-6);
        assert!((info.a12 + 2.0).abs() < 1e-6);
        assert!((info.a22 - 3.0).abs() < 1e-6);
    }

    #[test]
    fn information_doubles_with_doubled_sample() {
        let s = synthetic(400, 2.0, 3.0, 1.0, 3);
        let doubled = s.concat(&s).unwrap();
        let f1 = fit_mle(&s).unwrap();
        let f2 = fit_mle(&doubled).unwrap();
        let (i1, i2) = (f1.info.unwrap(), f2.info.unwrap());
        for (a, b) in [(i1.a11, i2.a11), (i1.a12, i2.a12), (i1.a22, i2.a22)] {
            assert!((b / a - 2.0).abs() < 0.3, "{a} -> {b}");
        }
        let cov = i1.inverse().unwrap();
        assert!(cov.a11 > 0.0 && cov.a22 > 0.0);
    }

    #[test]
    fn wald_with_identity_information() {
        let (a, b) = wald_intervals_from([2.0, 3.0], &SymMatrix2::IDENTITY, 0.05).unwrap();
        let z = 1.959_963_984_540_054;
        assert_relative_eq!(a.lower, 2.0 - z, epsilon = 1e-12);
        assert_relative_eq!(a.upper, 2.0 + z, epsilon = 1e-12);
        assert_relative_eq!(b.lower, 3.0 - z, epsilon = 1e-12);
        assert_relative_eq!(b.upper, 3.0 + z, epsilon = 1e-12);
        let (c, _) = wald_intervals_from([0.5, 3.0], &SymMatrix2::IDENTITY, 0.05).unwrap();
        assert!(c.lower > 0.0);
    }

    #[test]
    fn intervals_narrow_with_more_data() {
        let big = synthetic(1600, 2.0, 3.0, 1.0, 8);
        let small = Sample::new(big.values()[..200].to_vec(), 1.0).unwrap();
        let fs = fit_mle(&small).unwrap();
        let fb = fit_mle(&big).unwrap();
        assert!(fb.ci_alpha.unwrap().width() < fs.ci_alpha.unwrap().width());
        assert!(fb.ci_beta.unwrap().width() < fs.ci_beta.unwrap().width());
        let area_s = confidence_ellipse(&fs, 0.05, 64).unwrap().area();
        let area_b = confidence_ellipse(&fb, 0.05, 64).unwrap().area();
        // area scales like 1/n: factor 8 here
        assert!(
            (area_s / area_b) > 4.0 && (area_s / area_b) < 16.0,
            "{}",
            area_s / area_b
        );
    }

    #[test]
    fn scale_equivariance() {
        let s = synthetic(300, 2.0, 3.0, 1.0, 17);
        let base = fit_mle(&s).unwrap();
        for c in [0.1, 10.0] {
            let scaled = s.rescaled(1.0 / c).unwrap();
            let fit = fit_mle(&scaled).unwrap();
            assert_relative_eq!(
                fit.alpha().unwrap(),
                c * base.alpha().unwrap(),
                max_relative = 1e-8
            );
            assert_relative_eq!(fit.beta(), base.beta(), max_relative = 1e-8);
        }
    }

    #[test]
    fn untruncated_fit() {
        let s = synthetic(2000, 5.0, 1.7, 0.0, 4);
        let fit = fit_mle(&s).unwrap();
        assert!(fit.existence.is_none());
        assert!((fit.alpha().unwrap() - 5.0).abs() < 0.3);
        assert!((fit.beta() - 1.7).abs() < 0.1);
        let g = score_norm(&s, &fit).unwrap();
        assert!(g < 1e-5 * (1.0 + fit.loglik.abs()));
    }
}
