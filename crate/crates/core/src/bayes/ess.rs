/// Effective sample size by Geyer's initial positive sequence: autocorrelations
/// are summed in adjacent pairs until a pair sum turns non-positive.
pub fn effective_sample_size(chain: &[f64]) -> f64 {
    let n = chain.len();
    if n < 4 {
        return n as f64;
    }
    let mean = chain.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = chain.iter().map(|x| x - mean).collect();
    let c0 = centered.iter().map(|x| x * x).sum::<f64>() / n as f64;
    if c0 == 0.0 {
        return n as f64;
    }
    let rho = |lag: usize| {
        centered[..n - lag]
            .iter()
            .zip(&centered[lag..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / (n as f64 * c0)
    };
    let mut tau = -1.0;
    let mut k = 0;
    while 2 * k + 1 < n {
        let pair = rho(2 * k) + rho(2 * k + 1);
        if pair <= 0.0 {
            break;
        }
        tau += 2.0 * pair;
        k += 1;
    }
    (n as f64 / tau.max(1.0 / n as f64)).min(n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngStream;

    #[test]
    fn white_noise_is_close_to_n() {
        let mut rng = RngStream::new(1, 0);
        let x: Vec<f64> = (0..5000).map(|_| rng.draw_std_normal()).collect();
        let ess = effective_sample_size(&x);
        assert!(ess > 4000.0 && ess <= 5000.0, "{ess}");
    }

    #[test]
    fn ar1_matches_theory() {
        // integrated autocorrelation time (1 + ρ) / (1 − ρ) = 3 for ρ = 0.5
        let mut rng = RngStream::new(2, 0);
        let mut x = vec![0.0; 40000];
        for i in 1..x.len() {
            x[i] = 0.5 * x[i - 1] + rng.draw_std_normal();
        }
        let ratio = x.len() as f64 / effective_sample_size(&x);
        assert!((ratio - 3.0).abs() < 0.4, "{ratio}");
    }

    #[test]
    fn constant_chain() {
        assert_eq!(effective_sample_size(&[2.0; 50]), 50.0);
    }
}
