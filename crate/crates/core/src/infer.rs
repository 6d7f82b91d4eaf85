//! Fiducial confidence procedures and tests built on a [`FiducialEnsemble`].
//!
//! Sup-norm statistics against the pointwise median use the window grid, which
//! always contains every knot of every draw. Between two grid points the median
//! is constant and each log-linear draw is continuous and monotone, so the sup
//! over the interval is attained at one of its ends.

use serde::{Deserialize, Serialize};

use crate::curve::{
    empirical_quantile, median_in_place, sup_distance, sup_signed, Curve, EvaluationWindow, StepCurve,
};
use crate::error::{Error, Result};
use crate::gfd::FiducialEnsemble;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    /// Quantiles of the log-linear draws.
    #[default]
    Interp,
    /// Lower quantile of the lower bounds, upper quantile of the upper bounds.
    Conservative,
}

impl std::str::FromStr for Flavor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "interp" | "interpolation" => Ok(Flavor::Interp),
            "conservative" => Ok(Flavor::Conservative),
            other => Err(Error::InvalidArgument(format!("unknown flavor `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("level must lie in (0, 1), got {level}")))
    }
}

/// Equal-tailed interval from the lower and upper samples at `t`.
pub fn interval_from_samples(lower: &[f64], upper: &[f64], level: f64) -> Interval {
    let alpha = 1.0 - level;
    Interval {
        lower: empirical_quantile(lower, 0.5 * alpha),
        upper: empirical_quantile(upper, 1.0 - 0.5 * alpha),
    }
}

pub fn pointwise_ci(ensemble: &FiducialEnsemble, t: f64, level: f64, flavor: Flavor) -> Result<Interval> {
    check_level(level)?;
    let draws = ensemble.draws();
    Ok(match flavor {
        Flavor::Interp => {
            let v: Vec<f64> = draws.iter().map(|d| d.interp.eval(t)).collect();
            interval_from_samples(&v, &v, level)
        }
        Flavor::Conservative => {
            let lo: Vec<f64> = draws.iter().map(|d| d.lower.eval(t)).collect();
            let hi: Vec<f64> = draws.iter().map(|d| d.upper.eval(t)).collect();
            interval_from_samples(&lo, &hi, level)
        }
    })
}

/// Interval for the time at which survival falls to `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantileInterval {
    pub q: f64,
    pub lower: f64,
    pub upper: f64,
    /// The lower limit fell past every draw's reach and is reported as `tau`.
    pub lower_open: bool,
    /// The upper limit fell past every draw's reach and is reported as `tau`.
    pub upper_open: bool,
    /// Draws whose curve never reaches `q`.
    pub non_identifiable: usize,
}

pub fn quantile_ci(
    ensemble: &FiducialEnsemble,
    q: f64,
    level: f64,
    window: &EvaluationWindow,
) -> Result<QuantileInterval> {
    check_level(level)?;
    let mut times = Vec::with_capacity(ensemble.m());
    for d in ensemble.draws() {
        match d.interp.invert(q) {
            Ok(t) => times.push(t),
            Err(Error::NonIdentifiable(_)) => times.push(f64::INFINITY),
            Err(e) => return Err(e),
        }
    }
    let non_identifiable = times.iter().filter(|t| t.is_infinite()).count();
    if non_identifiable == times.len() {
        return Err(Error::AllNonIdentifiable(q));
    }
    let iv = interval_from_samples(&times, &times, level);
    let tau = window.tau();
    Ok(QuantileInterval {
        q,
        lower: if iv.lower.is_finite() { iv.lower } else { tau },
        upper: if iv.upper.is_finite() { iv.upper } else { tau },
        lower_open: iv.lower.is_infinite(),
        upper_open: iv.upper.is_infinite(),
        non_identifiable,
    })
}

/// `S^I_j` on the grid, row-major `m x grid.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMatrix {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f64>,
}

impl GridMatrix {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), rows * cols, "matrix shape");
        GridMatrix { rows, cols, values }
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.values[j * self.cols..(j + 1) * self.cols]
    }

    /// Pointwise median of each column.
    pub fn column_medians(&self) -> Vec<f64> {
        let mut col = vec![0.0; self.rows];
        (0..self.cols)
            .map(|k| {
                for (j, slot) in col.iter_mut().enumerate() {
                    *slot = self.values[j * self.cols + k];
                }
                median_in_place(&mut col)
            })
            .collect()
    }
}

/// Which deviations from the center a sup statistic measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sidedness {
    /// `sup |S - M|`.
    #[default]
    Two,
    /// `sup (M - S)`: evidence that the true survival lies above `S0`.
    Upper,
    /// `sup (S - M)`: evidence that the true survival lies below `S0`.
    Lower,
}

impl std::str::FromStr for Sidedness {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "two" | "two-sided" => Ok(Sidedness::Two),
            "upper" => Ok(Sidedness::Upper),
            "lower" => Ok(Sidedness::Lower),
            other => Err(Error::InvalidArgument(format!("unknown sidedness `{other}`"))),
        }
    }
}

/// Sup deviation of a continuous monotone curve sampled at the grid from a
/// center that is constant on each grid cell.
pub fn grid_sup_deviation(row: &[f64], center: &[f64], sided: Sidedness) -> f64 {
    let mut best: f64 = 0.0;
    for k in 0..row.len() {
        let m = center[k];
        let here = row[k] - m;
        let next = row.get(k + 1).map(|v| v - m).unwrap_or(here);
        best = best.max(match sided {
            Sidedness::Two => here.abs().max(next.abs()),
            Sidedness::Lower => here.max(next),
            Sidedness::Upper => (-here).max(-next),
        });
    }
    best
}

/// `sup` over grid points only.
pub fn grid_max_deviation(row: &[f64], center: &[f64]) -> f64 {
    row.iter().zip(center).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// `#{l_j >= l_0} / m`.
pub fn exceedance_p_value(samples: &[f64], l0: f64) -> f64 {
    samples.iter().filter(|&&l| l >= l0).count() as f64 / samples.len() as f64
}

/// Sup-norm ball `{S : ||S - M|| <= radius}` around the pointwise median.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceBand {
    pub center: StepCurve,
    pub radius: f64,
    pub level: f64,
    pub window: EvaluationWindow,
}

impl ConfidenceBand {
    pub fn lower_at(&self, t: f64) -> f64 {
        (self.center.eval(t) - self.radius).clamp(0.0, 1.0)
    }

    pub fn upper_at(&self, t: f64) -> f64 {
        (self.center.eval(t) + self.radius).clamp(0.0, 1.0)
    }

    /// `(t, lower, center, upper)` at every grid point.
    pub fn grid_rows(&self) -> Vec<[f64; 4]> {
        self.window
            .grid()
            .iter()
            .map(|&t| [t, self.lower_at(t), self.center.eval(t), self.upper_at(t)])
            .collect()
    }

    /// Whether `curve` stays within the band on `[0, tau]`.
    pub fn contains<C: Curve + ?Sized>(&self, curve: &C) -> bool {
        sup_distance(curve, &self.center, &self.window) <= self.radius
    }
}

struct Centered {
    window: EvaluationWindow,
    matrix: GridMatrix,
    center: Vec<f64>,
}

fn centered(ensemble: &FiducialEnsemble, window: &EvaluationWindow) -> Centered {
    let window = window.refined(ensemble.knots().iter().copied());
    let grid = window.grid();
    let matrix = GridMatrix::new(ensemble.m(), grid.len(), ensemble.interp_matrix(grid));
    let center = matrix.column_medians();
    Centered { window, matrix, center }
}

fn center_curve(grid: &[f64], center: &[f64]) -> StepCurve {
    StepCurve::from_steps(grid.iter().copied().zip(center.iter().copied()))
}

pub fn curvewise_band(ensemble: &FiducialEnsemble, level: f64, window: &EvaluationWindow) -> Result<ConfidenceBand> {
    check_level(level)?;
    if ensemble.m() < 2 {
        return Err(Error::InvalidArgument("a band needs at least two draws".into()));
    }
    let c = centered(ensemble, window);
    let l: Vec<f64> = (0..c.matrix.rows)
        .map(|j| grid_sup_deviation(c.matrix.row(j), &c.center, Sidedness::Two))
        .collect();
    Ok(ConfidenceBand {
        center: center_curve(c.window.grid(), &c.center),
        radius: empirical_quantile(&l, level),
        level,
        window: c.window,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub p_value: f64,
    /// `l_0`: distance from the null curve to the fiducial center.
    pub statistic: f64,
    pub null: String,
    pub m: usize,
    pub sided: Sidedness,
    pub tau: f64,
    /// `p < 1/m`: the proportion cannot resolve smaller values.
    pub below_resolution: bool,
}

impl TestReport {
    fn new(samples: &[f64], statistic: f64, null: String, sided: Sidedness, tau: f64) -> Self {
        let p_value = exceedance_p_value(samples, statistic);
        let m = samples.len();
        TestReport { p_value, statistic, null, m, sided, tau, below_resolution: p_value < 1.0 / m as f64 }
    }
}

/// Fiducial test of `H0: S = S0` on `[0, tau]`.
pub fn one_sample_test<C: Curve + ?Sized>(
    ensemble: &FiducialEnsemble,
    s0: &C,
    sided: Sidedness,
    window: &EvaluationWindow,
    null: &str,
) -> Result<TestReport> {
    let c = centered(ensemble, window);
    let center = center_curve(c.window.grid(), &c.center);
    let l0 = match sided {
        Sidedness::Two => sup_distance(s0, &center, &c.window),
        Sidedness::Lower => sup_signed(s0, &center, &c.window).max(0.0),
        Sidedness::Upper => sup_signed(&center, s0, &c.window).max(0.0),
    };
    let l: Vec<f64> =
        (0..c.matrix.rows).map(|j| grid_sup_deviation(c.matrix.row(j), &c.center, sided)).collect();
    Ok(TestReport::new(&l, l0, null.to_string(), sided, c.window.tau()))
}

/// Fiducial test of `H0: S_A - S_B = delta0` on the window grid.
///
/// Draw `j` of `a` is paired with draw `j` of `b`; the center is the pointwise
/// median of the paired differences.
pub fn two_sample_test<C: Curve + ?Sized>(
    a: &FiducialEnsemble,
    b: &FiducialEnsemble,
    delta0: &C,
    window: &EvaluationWindow,
    null: &str,
) -> Result<TestReport> {
    if a.m() != b.m() {
        return Err(Error::MismatchedM(a.m(), b.m()));
    }
    let window = window.refined(a.knots().iter().chain(b.knots()).copied());
    let grid = window.grid();
    let ma = a.interp_matrix(grid);
    let mb = b.interp_matrix(grid);
    let diff = GridMatrix::new(a.m(), grid.len(), ma.iter().zip(&mb).map(|(x, y)| x - y).collect());
    let null_values: Vec<f64> = grid.iter().map(|&t| delta0.eval(t)).collect();
    let (l, l0) = paired_difference_statistics(&diff, &null_values);
    Ok(TestReport::new(&l, l0, null.to_string(), Sidedness::Two, window.tau()))
}

/// `(l_j, l_0)` for a matrix of paired differences and the null on the grid.
pub fn paired_difference_statistics(diff: &GridMatrix, null_values: &[f64]) -> (Vec<f64>, f64) {
    let center = diff.column_medians();
    let l = (0..diff.rows).map(|j| grid_max_deviation(diff.row(j), &center)).collect();
    (l, grid_max_deviation(null_values, &center))
}
