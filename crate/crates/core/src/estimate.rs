//! Point estimators: Kaplan-Meier with Greenwood variance, the modified
//! Kaplan-Meier curve, and the fiducial pointwise-median estimator.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::curve::{pointwise_median_curve, EvaluationWindow, StepCurve};
use crate::dataset::SortedDataset;
use crate::error::{Error, Result};
use crate::gfd::FiducialEnsemble;

/// How the Kaplan-Meier curve is continued past the last observation when
/// that observation is censored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailConvention {
    /// Drops to 0.
    Kml,
    /// Midpoint of the other two.
    #[default]
    Kmm,
    /// Held at the last value.
    Kmh,
}

impl std::str::FromStr for TailConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "kml" => Ok(TailConvention::Kml),
            "kmm" => Ok(TailConvention::Kmm),
            "kmh" => Ok(TailConvention::Kmh),
            other => Err(Error::InvalidArgument(format!("unknown tail convention `{other}`"))),
        }
    }
}

fn product_limit(data: &SortedDataset, extra: f64) -> StepCurve {
    let mut s = 1.0;
    let steps: Vec<(f64, f64)> = data
        .event_times()
        .iter()
        .zip(data.risk_counts().iter().zip(data.event_counts()))
        .map(|(&t, (&k, &d))| {
            s *= 1.0 - d as f64 / (k as f64 + extra);
            (t, s.max(0.0))
        })
        .collect();
    StepCurve::from_steps(steps)
}

/// Product-limit estimator `prod (1 - dN / K)`, held after the last observation.
pub fn kaplan_meier(data: &SortedDataset) -> StepCurve {
    product_limit(data, 0.0)
}

/// Kaplan-Meier with the given continuation past the last observation.
pub fn kaplan_meier_with_tail(data: &SortedDataset, tail: TailConvention) -> StepCurve {
    let km = kaplan_meier(data);
    let last = km.last_value();
    let tail_value = match tail {
        TailConvention::Kmh => return km,
        TailConvention::Kml => 0.0,
        TailConvention::Kmm => 0.5 * last,
    };
    if last == 0.0 {
        return km;
    }
    let after = data.max_time().next_up();
    StepCurve::from_steps(km.points().chain(std::iter::once((after, tail_value))))
}

/// `prod (1 - dN / (1 + K))`: the expectation of the upper fiducial bound.
pub fn modified_km(data: &SortedDataset) -> StepCurve {
    product_limit(data, 1.0)
}

/// Kaplan-Meier curve with Greenwood variances at its knots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithVariance {
    pub curve: StepCurve,
    /// Greenwood variance of the estimate at each knot.
    pub variance: Vec<f64>,
    /// Cumulative `sum d / (K (K - d))` at each knot: the variance of `log S`.
    log_variance: Vec<f64>,
}

impl EstimateWithVariance {
    pub fn log_variance(&self) -> &[f64] {
        &self.log_variance
    }

    /// Variance of the estimate at `t`; zero before the first knot.
    pub fn variance_at(&self, t: f64) -> f64 {
        match self.curve.knots().partition_point(|&k| k <= t) {
            0 => 0.0,
            i => self.variance[i - 1],
        }
    }

    fn log_variance_at(&self, t: f64) -> f64 {
        match self.curve.knots().partition_point(|&k| k <= t) {
            0 => 0.0,
            i => self.log_variance[i - 1],
        }
    }
}

pub fn greenwood(data: &SortedDataset) -> EstimateWithVariance {
    let mut s = 1.0;
    let mut acc = 0.0;
    let mut knots = Vec::new();
    let mut values = Vec::new();
    let mut variance = Vec::new();
    let mut log_variance = Vec::new();
    for ((&t, &k), &d) in data.event_times().iter().zip(data.risk_counts()).zip(data.event_counts()) {
        let (k, d) = (k as f64, d as f64);
        s *= 1.0 - d / k;
        acc += if k > d { d / (k * (k - d)) } else { f64::INFINITY };
        knots.push(t);
        values.push(s.max(0.0));
        variance.push(if s > 0.0 { s * s * acc } else { 0.0 });
        log_variance.push(acc);
    }
    let curve = StepCurve::new(knots, values).expect("product-limit values are a valid step curve");
    EstimateWithVariance { curve, variance, log_variance }
}

/// Standard-normal quantile.
pub fn normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

/// Log-transformed interval `exp(log S +- z se(log S))`, clipped to `[0, 1]`.
pub fn greenwood_ci(est: &EstimateWithVariance, t: f64, level: f64) -> Result<(f64, f64)> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidArgument(format!("level must lie in (0, 1), got {level}")));
    }
    let s = est.curve.eval(t);
    if s <= 0.0 {
        return Err(Error::DegenerateAtZero(t));
    }
    let se = est.log_variance_at(t).sqrt();
    let z = normal_quantile(0.5 + 0.5 * level);
    let lo = (s.ln() - z * se).exp().clamp(0.0, 1.0);
    let hi = (s.ln() + z * se).exp().clamp(0.0, 1.0);
    Ok((lo, hi))
}

/// Pointwise median of the log-linear fiducial curves over the window grid.
pub fn fiducial_point_estimate(ensemble: &FiducialEnsemble, window: &EvaluationWindow) -> StepCurve {
    let window = window.refined(ensemble.knots().iter().copied());
    pointwise_median_curve(&ensemble.interp_curves(), &window)
}
