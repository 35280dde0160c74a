use serde::Serialize;

use crate::error::{LtllError, Result};
use crate::numerics::sample_moments;

/// Rectangular grid over `(α, β)`; densities are evaluated at cell centres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub alpha: (f64, f64),
    pub beta: (f64, f64),
    pub n_alpha: usize,
    pub n_beta: usize,
}

impl GridSpec {
    fn validate(&self) -> Result<()> {
        let ok_range = |(lo, hi): (f64, f64)| lo.is_finite() && hi.is_finite() && hi > lo;
        if self.n_alpha == 0 || self.n_beta == 0 || !ok_range(self.alpha) || !ok_range(self.beta) {
            return Err(LtllError::Domain(format!("empty or invalid grid {self:?}")));
        }
        Ok(())
    }

    pub fn cell_area(&self) -> f64 {
        self.step_alpha() * self.step_beta()
    }

    fn step_alpha(&self) -> f64 {
        (self.alpha.1 - self.alpha.0) / self.n_alpha as f64
    }

    fn step_beta(&self) -> f64 {
        (self.beta.1 - self.beta.0) / self.n_beta as f64
    }

    pub fn alpha_centers(&self) -> Vec<f64> {
        let h = self.step_alpha();
        (0..self.n_alpha)
            .map(|i| self.alpha.0 + (i as f64 + 0.5) * h)
            .collect()
    }

    pub fn beta_centers(&self) -> Vec<f64> {
        let h = self.step_beta();
        (0..self.n_beta)
            .map(|j| self.beta.0 + (j as f64 + 0.5) * h)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityGrid {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    /// `density[i][j]` at `(alpha[i], beta[j])`.
    pub density: Vec<Vec<f64>>,
    pub bandwidth: [f64; 2],
}

impl DensityGrid {
    pub fn integral(&self, cell_area: f64) -> f64 {
        self.density.iter().flatten().sum::<f64>() * cell_area
    }

    pub fn argmax(&self) -> (usize, usize) {
        let mut best = (0, 0);
        for (i, row) in self.density.iter().enumerate() {
            for (j, &d) in row.iter().enumerate() {
                if d > self.density[best.0][best.1] {
                    best = (i, j);
                }
            }
        }
        best
    }
}

/// Silverman's rule `0.9 min(sd, IQR/1.34) n^{−1/5}`, floored at half a grid cell.
fn bandwidth(values: &[f64], floor: f64) -> f64 {
    let sd = sample_moments(values)
        .map(|m| m.variance.sqrt())
        .unwrap_or(0.0);
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = crate::numerics::quantile_sorted(&sorted, 0.75)
        - crate::numerics::quantile_sorted(&sorted, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    (0.9 * spread * (values.len() as f64).powf(-0.2)).max(floor)
}

/// Product-Gaussian kernel density estimate of 2-d draws on a grid.
pub fn kde_grid(draws: &[[f64; 2]], grid: &GridSpec) -> Result<DensityGrid> {
    grid.validate()?;
    if draws.is_empty() {
        return Err(LtllError::InsufficientData { needed: 1, got: 0 });
    }
    let a: Vec<f64> = draws.iter().map(|d| d[0]).collect();
    let b: Vec<f64> = draws.iter().map(|d| d[1]).collect();
    let ha = bandwidth(&a, 0.5 * grid.step_alpha());
    let hb = bandwidth(&b, 0.5 * grid.step_beta());
    let kernel = |centers: &[f64], data: &[f64], h: f64| -> Vec<Vec<f64>> {
        let norm = 1.0 / (h * (2.0 * std::f64::consts::PI).sqrt());
        centers
            .iter()
            .map(|c| {
                data.iter()
                    .map(|x| norm * (-0.5 * ((c - x) / h).powi(2)).exp())
                    .collect()
            })
            .collect()
    };
    let alpha = grid.alpha_centers();
    let beta = grid.beta_centers();
    let ka = kernel(&alpha, &a, ha);
    let kb = kernel(&beta, &b, hb);
    let scale = 1.0 / draws.len() as f64;
    let density = ka
        .iter()
        .map(|row_a| {
            kb.iter()
                .map(|row_b| row_a.iter().zip(row_b).map(|(x, y)| x * y).sum::<f64>() * scale)
                .collect()
        })
        .collect();
    Ok(DensityGrid {
        alpha,
        beta,
        density,
        bandwidth: [ha, hb],
    })
}
