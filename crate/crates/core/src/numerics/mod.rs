//! Scalar and 2x2 matrix utilities plus the splittable random source used
//! throughout the crate.

mod diff;
mod interval;
mod matrix;
mod rng;
mod roots;
mod special;
mod stats;

pub use diff::{
    default_gradient_step, default_hessian_step, finite_diff_gradient, finite_diff_hessian,
    finite_diff_jacobian,
};
pub use interval::Interval;
pub use matrix::{Eigen2, SymMatrix2};
pub use rng::{derive_seed, RngStream};
pub use roots::bisect_root;
pub use special::{chi2_quantile_2dof, ln_gamma, normal_quantile, softplus};
pub use stats::{quantile_sorted, sample_moments, Moments};
