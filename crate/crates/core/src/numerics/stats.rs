use crate::error::{domain, LtllError, Result};

/// First four sample moments. Variance uses the `n - 1` denominator;
/// skewness and kurtosis are the standardized central moments
/// `m3 / m2^{3/2}` and `m4 / m2^2` with `m_k = Σ(x - x̄)^k / n`
/// (kurtosis is not excess kurtosis).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

impl Moments {
    pub fn skewness(&self) -> Result<f64> {
        if self.n < 3 {
            return Err(LtllError::InsufficientData {
                needed: 3,
                got: self.n,
            });
        }
        if self.m2 <= 0.0 {
            return domain("skewness undefined for zero variance");
        }
        Ok(self.m3 / self.m2.powf(1.5))
    }

    pub fn kurtosis(&self) -> Result<f64> {
        if self.n < 4 {
            return Err(LtllError::InsufficientData {
                needed: 4,
                got: self.n,
            });
        }
        if self.m2 <= 0.0 {
            return domain("kurtosis undefined for zero variance");
        }
        Ok(self.m4 / (self.m2 * self.m2))
    }

    /// Standard error of the mean, `sqrt(variance / n)`.
    pub fn mean_std_error(&self) -> f64 {
        (self.variance / self.n as f64).sqrt()
    }

    /// Large-sample standard error of the variance estimate, `sqrt((m4 - m2²) / n)`.
    pub fn variance_std_error(&self) -> f64 {
        ((self.m4 - self.m2 * self.m2).max(0.0) / self.n as f64).sqrt()
    }
}

pub fn sample_moments(values: &[f64]) -> Result<Moments> {
    let n = values.len();
    if n < 2 {
        return Err(LtllError::InsufficientData { needed: 2, got: n });
    }
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let (mut s2, mut s3, mut s4) = (0.0, 0.0, 0.0);
    for &x in values {
        let d = x - mean;
        let d2 = d * d;
        s2 += d2;
        s3 += d2 * d;
        s4 += d2 * d2;
    }
    Ok(Moments {
        n,
        mean,
        variance: s2 / (nf - 1.0),
        m2: s2 / nf,
        m3: s3 / nf,
        m4: s4 / nf,
    })
}

/// Quantile of already sorted data by linear interpolation between order
/// statistics at position `(n - 1) p` (zero-based).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let pos = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}
