use super::SymMatrix2;
use crate::error::{LtllError, Result};

/// Default central-difference step for gradients: `max(1e-6, 1e-6 |θ_i|)`.
pub fn default_gradient_step(theta: [f64; 2]) -> [f64; 2] {
    theta.map(|t| (1e-6 * t.abs()).max(1e-6))
}

/// Default step for second differences: `max(1e-4, 1e-4 |θ_i|)`, near the
/// fourth root of machine epsilon where truncation and rounding error balance.
pub fn default_hessian_step(theta: [f64; 2]) -> [f64; 2] {
    theta.map(|t| (1e-4 * t.abs()).max(1e-4))
}

fn eval<F: Fn([f64; 2]) -> f64>(f: &F, x: [f64; 2]) -> Result<f64> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(LtllError::Evaluation(x[0], x[1]))
    }
}

/// Central-difference gradient of `f` at `theta`.
pub fn finite_diff_gradient<F>(f: F, theta: [f64; 2], step: Option<[f64; 2]>) -> Result<[f64; 2]>
where
    F: Fn([f64; 2]) -> f64,
{
    let h = step.unwrap_or_else(|| default_gradient_step(theta));
    let mut grad = [0.0; 2];
    for i in 0..2 {
        let mut plus = theta;
        let mut minus = theta;
        plus[i] += h[i];
        minus[i] -= h[i];
        grad[i] = (eval(&f, plus)? - eval(&f, minus)?) / (plus[i] - minus[i]);
    }
    Ok(grad)
}

/// Central-difference Hessian of `f` at `theta` on the symmetric nine-point stencil.
pub fn finite_diff_hessian<F>(f: F, theta: [f64; 2], step: Option<[f64; 2]>) -> Result<SymMatrix2>
where
    F: Fn([f64; 2]) -> f64,
{
    let h = step.unwrap_or_else(|| default_hessian_step(theta));
    let at = |d0: f64, d1: f64| eval(&f, [theta[0] + d0 * h[0], theta[1] + d1 * h[1]]);
    let f0 = at(0.0, 0.0)?;
    let a11 = (at(1.0, 0.0)? - 2.0 * f0 + at(-1.0, 0.0)?) / (h[0] * h[0]);
    let a22 = (at(0.0, 1.0)? - 2.0 * f0 + at(0.0, -1.0)?) / (h[1] * h[1]);
    let a12 =
        (at(1.0, 1.0)? - at(1.0, -1.0)? - at(-1.0, 1.0)? + at(-1.0, -1.0)?) / (4.0 * h[0] * h[1]);
    Ok(SymMatrix2::new(a11, a12, a22))
}

/// Central-difference Jacobian of a gradient field `g`, symmetrized by
/// averaging the two off-diagonal estimates.
pub fn finite_diff_jacobian<G>(g: G, theta: [f64; 2], step: Option<[f64; 2]>) -> Result<SymMatrix2>
where
    G: Fn([f64; 2]) -> [f64; 2],
{
    let h = step.unwrap_or_else(|| default_gradient_step(theta));
    let mut cols = [[0.0; 2]; 2];
    for j in 0..2 {
        let mut plus = theta;
        let mut minus = theta;
        plus[j] += h[j];
        minus[j] -= h[j];
        let (gp, gm) = (g(plus), g(minus));
        if !(gp.iter().chain(gm.iter()).all(|v| v.is_finite())) {
            return Err(LtllError::Evaluation(theta[0], theta[1]));
        }
        let width = plus[j] - minus[j];
        cols[j] = [(gp[0] - gm[0]) / width, (gp[1] - gm[1]) / width];
    }
    Ok(SymMatrix2::new(
        cols[0][0],
        0.5 * (cols[0][1] + cols[1][0]),
        cols[1][1],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gradient_examples() {
        let g = finite_diff_gradient(|t| t[0] * t[0] + t[1] * t[1], [1.0, 2.0], None).unwrap();
        assert!((g[0] - 2.0).abs() < 1e-8 && (g[1] - 4.0).abs() < 1e-8);
        let g = finite_diff_gradient(|_| 3.5, [7.0, -1.0], None).unwrap();
        assert_eq!(g, [0.0, 0.0]);
        let g = finite_diff_gradient(|t| t[0] * t[1], [3.0, 5.0], None).unwrap();
        assert!((g[0] - 5.0).abs() < 1e-8 && (g[1] - 3.0).abs() < 1e-8);
    }

    #[test]
    fn hessian_examples() {
        let h =
            finite_diff_hessian(|t| 0.5 * (t[0] * t[0] + t[1] * t[1]), [0.3, -2.0], None).unwrap();
        assert!((h.a11 - 1.0).abs() < 1e-6 && (h.a22 - 1.0).abs() < 1e-6 && h.a12.abs() < 1e-6);
        let h = finite_diff_hessian(|t| t[0] * t[1], [1.5, 4.0], None).unwrap();
        assert!(h.a11.abs() < 1e-6 && h.a22.abs() < 1e-6 && (h.a12 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn non_finite_is_an_error() {
        let err = finite_diff_gradient(|t| t[0].ln(), [0.0, 1.0], None).unwrap_err();
        assert!(matches!(err, LtllError::Evaluation(..)));
        assert!(finite_diff_hessian(|t| (t[1] - 1.0).ln(), [0.5, 1.0], None).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]
        #[test]
        fn gradient_of_random_quadratic(
            a in -5.0f64..5.0, b in -5.0f64..5.0, c in -5.0f64..5.0,
            d in -5.0f64..5.0, e in -5.0f64..5.0,
            x in -10.0f64..10.0, y in -10.0f64..10.0,
        ) {
            let f = |t: [f64; 2]| a * t[0] * t[0] + b * t[0] * t[1] + c * t[1] * t[1] + d * t[0] + e * t[1];
            let g = finite_diff_gradient(f, [x, y], None).unwrap();
            prop_assert!((g[0] - (2.0 * a * x + b * y + d)).abs() < 1e-7);
            prop_assert!((g[1] - (b * x + 2.0 * c * y + e)).abs() < 1e-7);
        }
    }
}
