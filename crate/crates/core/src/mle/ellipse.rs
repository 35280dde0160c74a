use serde::{Deserialize, Serialize};

use crate::error::{LtllError, Result};
use crate::numerics::{chi2_quantile_2dof, SymMatrix2};

/// Points on the level set `(θ − c)ᵀ M (θ − c) = q` where `q` is the 2-dof
/// chi-squared quantile at `level`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipsePoints {
    pub center: [f64; 2],
    pub points: Vec<[f64; 2]>,
    /// Confidence or credibility `1 − γ`.
    pub level: f64,
    /// Shape matrix `M` (observed information or inverse posterior covariance).
    pub matrix: SymMatrix2,
    pub threshold: f64,
}

impl EllipsePoints {
    pub fn area(&self) -> f64 {
        std::f64::consts::PI * self.threshold / self.matrix.det().sqrt()
    }

    /// Relative deviation of `p` from the level set.
    pub fn residual(&self, p: [f64; 2]) -> f64 {
        let d = [p[0] - self.center[0], p[1] - self.center[1]];
        self.matrix.quad_form(d) / self.threshold - 1.0
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        self.residual(p) <= 0.0
    }
}

/// Traces the ellipse through the eigendecomposition of `matrix`, at
/// angles `2πk/n_points`, `k = 0..n_points`. Four points give the extreme
/// points along the principal axes.
pub fn level_set_ellipse(
    center: [f64; 2],
    matrix: &SymMatrix2,
    gamma: f64,
    n_points: usize,
) -> Result<EllipsePoints> {
    if n_points < 4 {
        return Err(LtllError::Domain(format!(
            "need at least 4 ellipse points, got {n_points}"
        )));
    }
    if !matrix.is_positive_definite() {
        return Err(LtllError::NotPositiveDefinite {
            a11: matrix.a11,
            a12: matrix.a12,
            a22: matrix.a22,
        });
    }
    let threshold = chi2_quantile_2dof(1.0 - gamma)?;
    let eig = matrix.eigen();
    let radii = eig.values.map(|l| (threshold / l).sqrt());
    let points = (0..n_points)
        .map(|k| {
            let angle = std::f64::consts::TAU * k as f64 / n_points as f64;
            let (s, c) = angle.sin_cos();
            let (u, v) = (radii[0] * c, radii[1] * s);
            [
                center[0] + u * eig.vectors[0][0] + v * eig.vectors[1][0],
                center[1] + u * eig.vectors[0][1] + v * eig.vectors[1][1],
            ]
        })
        .collect();
    Ok(EllipsePoints {
        center,
        points,
        level: 1.0 - gamma,
        matrix: *matrix,
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn identity_gives_circle() {
        let e = level_set_ellipse([2.0, 3.0], &SymMatrix2::IDENTITY, 0.05, 256).unwrap();
        for p in &e.points {
            let r = (p[0] - 2.0).hypot(p[1] - 3.0);
            assert_relative_eq!(r, 5.991_464_547_107_979f64.sqrt(), max_relative = 1e-12);
        }
        assert!((5.991_464_55f64.sqrt() - 2.447_74).abs() < 1e-5);
    }

    #[test]
    fn points_on_level_set() {
        let m = SymMatrix2::new(40.0, -12.0, 9.0);
        let e = level_set_ellipse([5.0, 1.7], &m, 0.05, 300).unwrap();
        for p in &e.points {
            assert!(e.residual(*p).abs() < 1e-8);
        }
        let first = e.points[0];
        let last = *e.points.last().unwrap();
        assert!((first[0] - last[0]).hypot(first[1] - last[1]) < 0.05);
    }

    #[test]
    fn four_points_are_principal_extremes() {
        let m = SymMatrix2::new(4.0, 0.0, 1.0);
        let e = level_set_ellipse([0.0, 0.0], &m, 0.05, 4).unwrap();
        let q = e.threshold;
        // the short axis is along alpha (largest curvature), long along beta
        let expected = [
            [0.0, q.sqrt()],
            [-(q / 4.0).sqrt(), 0.0],
            [0.0, -q.sqrt()],
            [(q / 4.0).sqrt(), 0.0],
        ];
        let mut hits = 0;
        for p in &e.points {
            if expected
                .iter()
                .any(|x| (x[0] - p[0]).abs() < 1e-12 && (x[1] - p[1]).abs() < 1e-12)
            {
                hits += 1;
            }
        }
        assert_eq!(hits, 4);
    }

    #[test]
    fn rejects_indefinite() {
        let m = SymMatrix2::new(1.0, 2.0, 1.0);
        assert!(level_set_ellipse([0.0, 0.0], &m, 0.05, 16).is_err());
        assert!(level_set_ellipse([0.0, 0.0], &SymMatrix2::IDENTITY, 0.05, 3).is_err());
    }

    #[test]
    fn area_formula() {
        let e = level_set_ellipse([0.0, 0.0], &SymMatrix2::new(4.0, 0.0, 1.0), 0.05, 16).unwrap();
        assert_relative_eq!(e.area(), std::f64::consts::PI * e.threshold / 2.0);
    }
}
