//! Sampling from the generalized fiducial distribution of a survival function
//! under right censoring.

mod beta_product;
mod ensemble;
mod sampler;

pub use beta_product::{beta_product_draw, beta_product_values, expected_lower, expected_upper};
pub use ensemble::{sample_ensemble, FiducialCurves, FiducialEnsemble};
pub use sampler::{draw_bounds, log_linear_curve, sample_permutation, FiducialDraw, Sampler};
