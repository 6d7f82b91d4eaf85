use serde::{Deserialize, Serialize};

use super::{Curve, Shape};
use crate::error::{Error, Result};

/// Continuous survival curve that is piecewise linear in log-survival.
///
/// Anchors `(t_k, l_k)` start at `t_0 = 0`; beyond the last anchor the log
/// survival continues along `tail_slope`. A slope of `-inf` drops to zero
/// immediately after the last anchor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogLinearCurve {
    times: Vec<f64>,
    logs: Vec<f64>,
    tail_slope: f64,
}

impl LogLinearCurve {
    pub fn new(times: Vec<f64>, logs: Vec<f64>, tail_slope: f64) -> Result<Self> {
        if times.is_empty() || times.len() != logs.len() {
            return Err(Error::InvalidArgument("anchor lists must be nonempty and equal length".into()));
        }
        if times[0] != 0.0 {
            return Err(Error::InvalidArgument("first anchor must be at t = 0".into()));
        }
        if times.windows(2).any(|w| w[0] >= w[1]) || times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidArgument("anchor times must be finite and strictly increasing".into()));
        }
        if logs[0] > 0.0 || logs.windows(2).any(|w| w[1] > w[0]) || logs.iter().any(|l| l.is_nan()) {
            return Err(Error::InvalidArgument("log-survival anchors must be nonincreasing and <= 0".into()));
        }
        if tail_slope > 0.0 || tail_slope.is_nan() {
            return Err(Error::InvalidArgument(format!("tail slope must be <= 0, got {tail_slope}")));
        }
        Ok(LogLinearCurve { times, logs, tail_slope })
    }

    pub(crate) fn from_raw(times: Vec<f64>, logs: Vec<f64>, tail_slope: f64) -> Self {
        debug_assert!(times.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(logs.windows(2).all(|w| w[1] <= w[0]));
        debug_assert!(tail_slope <= 0.0);
        LogLinearCurve { times, logs, tail_slope }
    }

    pub(crate) fn parts_mut(&mut self) -> (&mut Vec<f64>, &mut Vec<f64>, &mut f64) {
        (&mut self.times, &mut self.logs, &mut self.tail_slope)
    }

    pub fn anchor_times(&self) -> &[f64] {
        &self.times
    }

    pub fn anchor_logs(&self) -> &[f64] {
        &self.logs
    }

    pub fn tail_slope(&self) -> f64 {
        self.tail_slope
    }

    /// Log survival at `t`.
    pub fn log_eval(&self, t: f64) -> f64 {
        let last = self.times.len() - 1;
        if t >= self.times[last] {
            let dt = t - self.times[last];
            if dt == 0.0 {
                return self.logs[last];
            }
            return self.logs[last] + self.tail_slope * dt;
        }
        let k = self.times.partition_point(|&x| x <= t) - 1;
        let (t0, t1) = (self.times[k], self.times[k + 1]);
        let (l0, l1) = (self.logs[k], self.logs[k + 1]);
        l0 + (l1 - l0) * (t - t0) / (t1 - t0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.log_eval(t).exp()
    }

    /// Evaluates at nondecreasing times in one pass.
    pub fn eval_sorted(&self, ts: &[f64], out: &mut Vec<f64>) {
        out.clear();
        let last = self.times.len() - 1;
        let mut k = 0;
        for &t in ts {
            while k < last && self.times[k + 1] <= t {
                k += 1;
            }
            let l = if k == last {
                let dt = t - self.times[last];
                if dt <= 0.0 {
                    self.logs[last]
                } else {
                    self.logs[last] + self.tail_slope * dt
                }
            } else {
                let (t0, t1) = (self.times[k], self.times[k + 1]);
                let (l0, l1) = (self.logs[k], self.logs[k + 1]);
                l0 + (l1 - l0) * (t - t0) / (t1 - t0)
            };
            out.push(l.exp());
        }
    }

    /// Smallest `t` with `S(t) <= q`.
    pub fn invert(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidArgument(format!("level must lie in (0, 1), got {q}")));
        }
        let target = q.ln();
        let k = self.logs.partition_point(|&l| l > target);
        if k == 0 {
            return Ok(0.0);
        }
        if k < self.logs.len() {
            let (t0, t1) = (self.times[k - 1], self.times[k]);
            let (l0, l1) = (self.logs[k - 1], self.logs[k]);
            return Ok(t0 + (target - l0) / (l1 - l0) * (t1 - t0));
        }
        let last = self.times.len() - 1;
        if self.tail_slope == 0.0 {
            return Err(Error::NonIdentifiable(q));
        }
        if self.tail_slope == f64::NEG_INFINITY {
            return Ok(self.times[last]);
        }
        Ok(self.times[last] + (target - self.logs[last]) / self.tail_slope)
    }

    fn slope_after(&self, k: usize) -> f64 {
        if k + 1 < self.times.len() {
            (self.logs[k + 1] - self.logs[k]) / (self.times[k + 1] - self.times[k])
        } else {
            self.tail_slope
        }
    }
}

impl Curve for LogLinearCurve {
    fn eval(&self, t: f64) -> f64 {
        LogLinearCurve::eval(self, t)
    }

    fn left_limit(&self, t: f64) -> f64 {
        let last = *self.times.last().unwrap();
        if t > last && self.tail_slope == f64::NEG_INFINITY {
            return 0.0;
        }
        self.eval(t)
    }

    fn breakpoints(&self, lo: f64, hi: f64, out: &mut Vec<f64>) {
        out.extend(self.times.iter().copied().filter(|&t| t > lo && t < hi));
    }

    fn shape_on(&self, a: f64, b: f64) -> Shape {
        let mid = 0.5 * (a + b);
        let k = self.times.partition_point(|&x| x <= mid).saturating_sub(1);
        let slope = self.slope_after(k);
        if slope == 0.0 {
            Shape::Constant(self.eval(a))
        } else if slope == f64::NEG_INFINITY {
            Shape::Constant(0.0)
        } else {
            Shape::LogLinear { log_start: self.log_eval(a), slope }
        }
    }
}
