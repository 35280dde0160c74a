//! Fitting the left-truncated log-logistic (LTLL) distribution.
//!
//! The crate covers the distribution itself ([`dist`]), maximum-likelihood
//! estimation with the interior-maximum existence check ([`mle`]),
//! Metropolis-Hastings posterior inference under Gamma priors ([`bayes`]) and
//! the Monte Carlo harness that compares the two estimators ([`sim`]).
//!
//! Replicate-level loops run on rayon when the default `parallel` feature is
//! on; every random draw comes from an [`numerics::RngStream`] keyed by
//! `(seed, index)`, so results do not depend on the schedule.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bayes;
pub mod dist;
pub mod error;
pub mod exec;
pub mod mle;
pub mod numerics;
pub mod sim;

pub use error::{LtllError, Result};
