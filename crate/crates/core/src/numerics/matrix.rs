use serde::{Deserialize, Serialize};

/// Symmetric 2x2 matrix `[[a11, a12], [a12, a22]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix2 {
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
}

/// Eigendecomposition with eigenvalues in ascending order and unit eigenvectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigen2 {
    pub values: [f64; 2],
    pub vectors: [[f64; 2]; 2],
}

impl SymMatrix2 {
    pub const IDENTITY: Self = Self {
        a11: 1.0,
        a12: 0.0,
        a22: 1.0,
    };

    pub fn new(a11: f64, a12: f64, a22: f64) -> Self {
        Self { a11, a12, a22 }
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a12
    }

    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    pub fn is_positive_definite(&self) -> bool {
        self.a11 > 0.0 && self.det() > 0.0 && self.a22.is_finite() && self.a12.is_finite()
    }

    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        Some(Self {
            a11: self.a22 / det,
            a12: -self.a12 / det,
            a22: self.a11 / det,
        })
    }

    pub fn scale(&self, k: f64) -> Self {
        Self {
            a11: k * self.a11,
            a12: k * self.a12,
            a22: k * self.a22,
        }
    }

    pub fn mul_vec(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.a11 * v[0] + self.a12 * v[1],
            self.a12 * v[0] + self.a22 * v[1],
        ]
    }

    /// `vᵀ A v`
    pub fn quad_form(&self, v: [f64; 2]) -> f64 {
        self.a11 * v[0] * v[0] + 2.0 * self.a12 * v[0] * v[1] + self.a22 * v[1] * v[1]
    }

    pub fn eigen(&self) -> Eigen2 {
        let half_trace = 0.5 * self.trace();
        let half_diff = 0.5 * (self.a11 - self.a22);
        let radius = half_diff.hypot(self.a12);
        let values = [half_trace - radius, half_trace + radius];
        // rotation angle that diagonalizes the matrix
        let theta = 0.5 * (2.0 * self.a12).atan2(self.a11 - self.a22);
        let (s, c) = theta.sin_cos();
        // (c, s) belongs to the larger eigenvalue
        Eigen2 {
            values,
            vectors: [[-s, c], [c, s]],
        }
    }
}
