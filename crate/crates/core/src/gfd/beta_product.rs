//! Beta-product representation of the upper fiducial bound.
//!
//! At each distinct failure time `s_i` the upper bound is multiplied by
//! `1 - dN(s_i) B_i` with independent `B_i ~ Beta(1, K(s_i))`, which gives the
//! same law as the permutation sampler and closed-form moments.

use rand::Rng;
use rand_distr::{Beta, Distribution};

use crate::curve::StepCurve;
use crate::dataset::SortedDataset;
use crate::rng::RngStream;

/// `S^U` at each distinct failure time, drawn from the beta product.
pub fn beta_product_values<R: Rng + ?Sized>(data: &SortedDataset, rng: &mut R, out: &mut Vec<f64>) {
    out.clear();
    let mut s = 1.0;
    for (&k, &d) in data.risk_counts().iter().zip(data.event_counts()) {
        let b = Beta::new(1.0, k as f64).expect("risk count is positive").sample(rng);
        s *= (1.0 - d as f64 * b).max(0.0);
        out.push(s);
    }
}

pub fn beta_product_draw(data: &SortedDataset, stream: RngStream) -> StepCurve {
    let mut values = Vec::new();
    beta_product_values(data, &mut stream.rng(), &mut values);
    StepCurve::from_steps(data.event_times().iter().copied().zip(values))
}

/// `E[S^U(s_i)] = prod_{s <= s_i} (1 - dN(s) / (1 + K(s)))` at each failure time.
pub fn expected_upper(data: &SortedDataset) -> Vec<f64> {
    let mut s = 1.0;
    data.risk_counts()
        .iter()
        .zip(data.event_counts())
        .map(|(&k, &d)| {
            s *= 1.0 - d as f64 / (1.0 + k as f64);
            s
        })
        .collect()
}

/// `E[S^L(s_i)] = E[S^U(s_i)] (1 - 1 / K(s_i))` at each failure time.
pub fn expected_lower(data: &SortedDataset) -> Vec<f64> {
    expected_upper(data)
        .into_iter()
        .zip(data.risk_counts())
        .map(|(s, &k)| s * (1.0 - 1.0 / k as f64))
        .collect()
}
