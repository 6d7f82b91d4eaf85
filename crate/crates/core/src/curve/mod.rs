//! Survival-curve representations and the operations shared by every
//! inference procedure: evaluation, sup-norm distance, pointwise quantiles.

mod loglinear;
mod norm;
mod quantile;
mod step;

pub use loglinear::LogLinearCurve;
pub use norm::{sup_distance, sup_signed};
pub use quantile::{
    empirical_quantile, median_in_place, order_stat_index, pointwise_median_curve,
    pointwise_quantile,
};
pub use step::StepCurve;

use serde::{Deserialize, Serialize};

use crate::dataset::SortedDataset;

/// Local analytic form of a curve strictly between two consecutive breakpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Constant(f64),
    /// `exp(log_start + slope * (t - a))` on `(a, b)`.
    LogLinear { log_start: f64, slope: f64 },
    /// Continuous and monotone, no closed form available.
    Monotone,
}

/// A real function of time on `[0, inf)` that the sup-norm machinery can handle
/// exactly (or, for [`Shape::Monotone`] pieces, to numerical precision).
pub trait Curve {
    fn eval(&self, t: f64) -> f64;

    /// Left limit `f(t-)`; equals `eval` for continuous curves.
    fn left_limit(&self, t: f64) -> f64 {
        self.eval(t)
    }

    /// Appends every point in the open interval `(lo, hi)` where the curve may
    /// jump or change its analytic form.
    fn breakpoints(&self, lo: f64, hi: f64, out: &mut Vec<f64>);

    /// Form of the curve on the open interval `(a, b)`, which contains no breakpoint.
    fn shape_on(&self, a: f64, b: f64) -> Shape;
}

impl<C: Curve + ?Sized> Curve for &C {
    fn eval(&self, t: f64) -> f64 {
        (**self).eval(t)
    }
    fn left_limit(&self, t: f64) -> f64 {
        (**self).left_limit(t)
    }
    fn breakpoints(&self, lo: f64, hi: f64, out: &mut Vec<f64>) {
        (**self).breakpoints(lo, hi, out)
    }
    fn shape_on(&self, a: f64, b: f64) -> Shape {
        (**self).shape_on(a, b)
    }
}

/// The constant function `value`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantCurve(pub f64);

impl Curve for ConstantCurve {
    fn eval(&self, _t: f64) -> f64 {
        self.0
    }
    fn breakpoints(&self, _lo: f64, _hi: f64, _out: &mut Vec<f64>) {}
    fn shape_on(&self, _a: f64, _b: f64) -> Shape {
        Shape::Constant(self.0)
    }
}

/// Upper time limit and evaluation grid for sup-norm computations.
///
/// The grid always contains `0` and `tau`, plus whatever knots were supplied
/// inside `(0, tau)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationWindow {
    tau: f64,
    grid: Vec<f64>,
}

impl EvaluationWindow {
    pub fn new(tau: f64, knots: impl IntoIterator<Item = f64>) -> crate::Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(crate::Error::InvalidArgument(format!("window tau must be positive, got {tau}")));
        }
        let mut grid: Vec<f64> = std::iter::once(0.0)
            .chain(knots.into_iter().filter(|&k| k > 0.0 && k < tau))
            .chain(std::iter::once(tau))
            .collect();
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        Ok(EvaluationWindow { tau, grid })
    }

    /// Window over one dataset: `tau` defaults to the largest failure time (the
    /// largest observed time when there are no failures); grid = observation times.
    pub fn for_dataset(data: &SortedDataset, tau: Option<f64>) -> crate::Result<Self> {
        let tau = tau.unwrap_or_else(|| data.max_failure_time().unwrap_or_else(|| data.max_time()));
        Self::new(tau, data.distinct_times())
    }

    /// Window over two datasets; `tau` defaults to the smaller of the two largest
    /// failure times.
    pub fn for_pair(a: &SortedDataset, b: &SortedDataset, tau: Option<f64>) -> crate::Result<Self> {
        let last = |d: &SortedDataset| d.max_failure_time().unwrap_or_else(|| d.max_time());
        let tau = tau.unwrap_or_else(|| last(a).min(last(b)));
        Self::new(tau, a.distinct_times().into_iter().chain(b.distinct_times()))
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Same `tau`, grid refined with extra knots.
    pub fn refined(&self, knots: impl IntoIterator<Item = f64>) -> Self {
        Self::new(self.tau, self.grid.iter().copied().chain(knots)).expect("tau already validated")
    }
}
