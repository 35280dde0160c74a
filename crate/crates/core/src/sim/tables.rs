use std::fmt::Write as _;

use super::{MethodSummary, MetricsReport};

pub const TRUNCATION_HEADER: &str =
    "x_L,method,alpha_hat,beta_hat,alpha_ci_l,alpha_ci_u,beta_ci_l,beta_ci_u";
pub const BIAS_VARIANCE_HEADER: &str =
    "x_L,method,alpha_hat,bias_alpha,var_alpha,beta_hat,bias_beta,var_beta";
pub const SAMPLE_SIZE_HEADER: &str =
    "n,method,bias_alpha,var_alpha,rmse_alpha,bias_beta,var_beta,rmse_beta";

fn methods(r: &MetricsReport) -> [(&'static str, Option<&MethodSummary>); 2] {
    [("MLE", r.mle.as_ref()), ("Bayesian", r.bayes.as_ref())]
}

fn row(out: &mut String, key: String, method: &str, values: &[f64]) {
    out.push_str(&key);
    out.push(',');
    out.push_str(method);
    for v in values {
        // NaN marks a cell with no usable replicates
        write!(out, ",{v:.6}").unwrap();
    }
    out.push('\n');
}

/// Mean point estimates and mean interval endpoints per truncation level.
pub fn write_truncation_table(reports: &[MetricsReport]) -> String {
    let mut out = format!("{TRUNCATION_HEADER}\n");
    for r in reports {
        for (name, m) in methods(r) {
            let values = match m {
                Some(m) => {
                    let ci = |c: Option<crate::numerics::Interval>| {
                        c.map_or([f64::NAN; 2], |c| [c.lower, c.upper])
                    };
                    let [al, au] = ci(m.alpha.mean_ci);
                    let [bl, bu] = ci(m.beta.mean_ci);
                    vec![m.alpha.metrics.mean, m.beta.metrics.mean, al, au, bl, bu]
                }
                None => vec![f64::NAN; 6],
            };
            row(&mut out, format!("{:.6}", r.x_l), name, &values);
        }
    }
    out
}

pub fn write_bias_variance_table(reports: &[MetricsReport]) -> String {
    let mut out = format!("{BIAS_VARIANCE_HEADER}\n");
    for r in reports {
        for (name, m) in methods(r) {
            let values = match m {
                Some(m) => {
                    let (a, b) = (m.alpha.metrics, m.beta.metrics);
                    vec![a.mean, a.bias, a.variance, b.mean, b.bias, b.variance]
                }
                None => vec![f64::NAN; 6],
            };
            row(&mut out, format!("{:.6}", r.x_l), name, &values);
        }
    }
    out
}

pub fn write_sample_size_table(reports: &[MetricsReport]) -> String {
    let mut out = format!("{SAMPLE_SIZE_HEADER}\n");
    for r in reports {
        for (name, m) in methods(r) {
            let values = match m {
                Some(m) => {
                    let (a, b) = (m.alpha.metrics, m.beta.metrics);
                    vec![a.bias, a.variance, a.rmse, b.bias, b.variance, b.rmse]
                }
                None => vec![f64::NAN; 6],
            };
            row(&mut out, r.n.to_string(), name, &values);
        }
    }
    out
}
