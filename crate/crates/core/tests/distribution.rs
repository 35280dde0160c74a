use ltll_core::dist::{
    draw_ltll, ll_cdf, ll_pdf, log_likelihood, ltll_cdf, ltll_pdf, ltll_quantile, score_gradient,
    LtllParams, Sample,
};
use ltll_core::numerics::{finite_diff_gradient, RngStream};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = LtllParams> {
    (0.2f64..20.0, 0.3f64..8.0, 0.0f64..3.0)
        .prop_map(|(a, b, r)| LtllParams::new(a, b, r * a).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn quantile_inverts_cdf(p in params(), u in 0.001f64..0.999) {
        let x = ltll_quantile(u, &p).unwrap();
        prop_assert!(x > p.x_l());
        prop_assert!((ltll_cdf(x, &p).unwrap() - u).abs() <= 1e-10);
    }

    #[test]
    fn cdf_is_monotone(p in params(), a in 0.01f64..50.0, d in 0.0f64..10.0) {
        let x = p.x_l() + a;
        prop_assert!(ltll_cdf(x + d, &p).unwrap() >= ltll_cdf(x, &p).unwrap());
    }

    #[test]
    fn untruncated_reduction(a in 0.2f64..20.0, b in 0.3f64..8.0, x in 0.01f64..100.0) {
        let p = LtllParams::new(a, b, 0.0).unwrap();
        prop_assert!((ltll_pdf(x, &p).unwrap() - ll_pdf(x, &p).unwrap()).abs() <= 1e-12 * (1.0 + ll_pdf(x, &p).unwrap()));
        prop_assert!((ltll_cdf(x, &p).unwrap() - ll_cdf(x, &p).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn truncated_density_is_renormalized(p in params(), a in 0.01f64..20.0) {
        let x = p.x_l() + a;
        let tail = 1.0 - ll_cdf(p.x_l(), &p).unwrap();
        let expected = ll_pdf(x, &p).unwrap() / tail;
        prop_assert!((ltll_pdf(x, &p).unwrap() / expected - 1.0).abs() < 1e-10);
    }

    #[test]
    fn score_matches_central_differences(
        p in params(),
        seed in 0u64..1000,
        n in 3usize..60,
        da in 0.6f64..1.6,
        db in 0.6f64..1.6,
    ) {
        let s = draw_ltll(n, &p, &mut RngStream::new(seed, 1)).unwrap();
        let theta = [p.alpha() * da, p.beta() * db];
        let g = score_gradient(&s, theta[0], theta[1]).unwrap();
        let fd = finite_diff_gradient(|t| log_likelihood(&s, t[0], t[1]).unwrap(), theta, None).unwrap();
        let scale = 1.0 + g[0].abs().max(g[1].abs());
        for k in 0..2 {
            prop_assert!((g[k] - fd[k]).abs() <= 1e-6 * scale, "{:?} vs {:?}", g, fd);
        }
    }
}

#[test]
fn density_integrates_to_one() {
    // substitute x = x_L + α t/(1−t) and integrate over t ∈ (0, 1) by the midpoint rule
    for (a, b, xl) in [
        (2.0, 3.0, 1.0),
        (5.0, 1.2, 0.0),
        (0.7, 6.0, 0.5),
        (10.0, 2.0, 25.0),
    ] {
        let p = LtllParams::new(a, b, xl).unwrap();
        let m = 200_000;
        let h = 1.0 / m as f64;
        let total: f64 = (0..m)
            .map(|i| {
                let t = (i as f64 + 0.5) * h;
                let x = xl + a * t / (1.0 - t);
                ltll_pdf(x, &p).unwrap() * a / (1.0 - t).powi(2) * h
            })
            .sum();
        assert!((total - 1.0).abs() < 1e-6, "{a} {b} {xl}: {total}");
    }
}

#[test]
fn draws_follow_the_cdf() {
    let p = LtllParams::new(2.0, 3.0, 1.0).unwrap();
    let s = draw_ltll(100_000, &p, &mut RngStream::new(2024, 0)).unwrap();
    let mut v = s.values().to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let ks = v
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = ltll_cdf(x, &p).unwrap();
            (f - i as f64 / n).abs().max((i as f64 + 1.0) / n - f)
        })
        .fold(0.0, f64::max);
    assert!(ks < 0.006, "{ks}");
}

#[test]
fn sample_rejects_values_below_truncation() {
    assert!(Sample::new(vec![0.5, 2.0], 1.0).is_err());
    assert!(Sample::new(vec![], 1.0).is_err());
    assert!(Sample::new(vec![1.0, 2.0], 1.0).is_err());
}
