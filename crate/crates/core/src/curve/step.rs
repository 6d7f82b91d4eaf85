use serde::{Deserialize, Serialize};

use super::{Curve, Shape};
use crate::error::{Error, Result};

/// Right-continuous nonincreasing step function with values in `[0, 1]`.
///
/// The curve equals 1 before the first knot and `values[k]` on
/// `[knots[k], knots[k + 1])`; the last value is held forever.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepCurve {
    knots: Vec<f64>,
    values: Vec<f64>,
}

impl StepCurve {
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.len() != values.len() {
            return Err(Error::InvalidArgument("knots and values differ in length".into()));
        }
        if knots.iter().any(|k| !k.is_finite() || *k < 0.0) {
            return Err(Error::InvalidArgument("knots must be finite and nonnegative".into()));
        }
        if knots.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("knots must be strictly increasing".into()));
        }
        let mut prev = 1.0;
        for &v in &values {
            if !(0.0..=1.0).contains(&v) || v > prev {
                return Err(Error::InvalidArgument(format!(
                    "step values must be nonincreasing in [0, 1], got {v} after {prev}"
                )));
            }
            prev = v;
        }
        Ok(StepCurve { knots, values })
    }

    /// Builds from `(time, value)` steps in time order. Repeated times keep the
    /// last value and steps that do not change the value are dropped.
    pub(crate) fn from_steps(steps: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let mut knots: Vec<f64> = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        for (t, v) in steps {
            if knots.last() == Some(&t) {
                *values.last_mut().unwrap() = v;
                let n = values.len();
                let before = if n >= 2 { values[n - 2] } else { 1.0 };
                if v == before {
                    knots.pop();
                    values.pop();
                }
                continue;
            }
            let before = values.last().copied().unwrap_or(1.0);
            if v != before {
                knots.push(t);
                values.push(v);
            }
        }
        debug_assert!(values.windows(2).all(|w| w[1] <= w[0]));
        StepCurve { knots, values }
    }

    /// The constant curve 1.
    pub fn one() -> Self {
        StepCurve { knots: Vec::new(), values: Vec::new() }
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn last_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(1.0)
    }

    /// Value on the interval starting at `t`.
    pub fn eval(&self, t: f64) -> f64 {
        match self.knots.partition_point(|&k| k <= t) {
            0 => 1.0,
            i => self.values[i - 1],
        }
    }

    pub fn left_limit(&self, t: f64) -> f64 {
        match self.knots.partition_point(|&k| k < t) {
            0 => 1.0,
            i => self.values[i - 1],
        }
    }

    /// `(t, value)` pairs, one per knot.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.knots.iter().copied().zip(self.values.iter().copied())
    }
}

impl Curve for StepCurve {
    fn eval(&self, t: f64) -> f64 {
        StepCurve::eval(self, t)
    }

    fn left_limit(&self, t: f64) -> f64 {
        StepCurve::left_limit(self, t)
    }

    fn breakpoints(&self, lo: f64, hi: f64, out: &mut Vec<f64>) {
        let start = self.knots.partition_point(|&k| k <= lo);
        out.extend(self.knots[start..].iter().copied().take_while(|&k| k < hi));
    }

    fn shape_on(&self, a: f64, _b: f64) -> Shape {
        Shape::Constant(self.eval(a))
    }
}
