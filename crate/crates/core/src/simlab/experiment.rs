//! Monte Carlo experiments over simulated datasets.
//!
//! Replication `r` draws its data from stream `(derive_seed(seed, DATA, r), 0)`
//! and its fiducial sample from seeds derived the same way, so results do not
//! depend on scheduling. Replications run in parallel and are aggregated in
//! replication order.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dist::{Distribution, SurvivalCurve};
use super::scenario::{sample_group, GroupSpec, ScenarioSpec};
use crate::curve::{empirical_quantile, median_in_place, sup_distance, EvaluationWindow, StepCurve};
use crate::dataset::{sort_and_validate, SortedDataset, SurvivalDataset, TiePolicy};
use crate::error::{Error, Result};
use crate::estimate::{kaplan_meier_with_tail, TailConvention};
use crate::gfd::Sampler;
use crate::infer::{
    exceedance_p_value, grid_sup_deviation, interval_from_samples, paired_difference_statistics, GridMatrix,
    Sidedness,
};
use crate::logrank::{all_variants, VARIANT_NAMES};
use crate::rng::{derive_seed, RngStream};

const TAG_DATA: u64 = 1;
const TAG_GFD: u64 = 2;
const TAG_GFD_B: u64 = 3;

fn rep_dataset(group: &GroupSpec, seed: u64, tag: u64, rep: u64) -> SortedDataset {
    let mut rng = RngStream::new(derive_seed(seed, tag, rep), 0).rng();
    let (times, failed) = sample_group(group, &mut rng);
    let data = SurvivalDataset::from_parts(&times, &failed).expect("simulated times are valid");
    sort_and_validate(&data, TiePolicy::default())
}

fn rep_pair(spec: &ScenarioSpec, seed: u64, rep: u64) -> (SortedDataset, SortedDataset) {
    let mut rng = RngStream::new(derive_seed(seed, TAG_DATA, rep), 0).rng();
    let mut draw = |g: &GroupSpec| {
        let (times, failed) = sample_group(g, &mut rng);
        sort_and_validate(&SurvivalDataset::from_parts(&times, &failed).expect("valid"), TiePolicy::default())
    };
    let a = draw(&spec.groups[0]);
    let b = draw(&spec.groups[1]);
    (a, b)
}

/// `S^I_j(g_k)` for `m` draws with streams `(seed, j)`.
pub fn interp_grid_matrix(data: &SortedDataset, m: usize, seed: u64, grid: &[f64]) -> Result<GridMatrix> {
    let mut sampler = Sampler::new(data);
    let mut values = Vec::with_capacity(m * grid.len());
    let mut row = Vec::with_capacity(grid.len());
    for j in 0..m as u64 {
        sampler.sample(&mut RngStream::new(seed, j).rng());
        sampler.interp_in_place()?.eval_sorted(grid, &mut row);
        values.extend_from_slice(&row);
    }
    Ok(GridMatrix::new(m, grid.len(), values))
}

/// Columns `(interp, lower, upper)` at each time: `out[k][j]` is draw `j` at `times[k]`.
struct PointSamples {
    interp: Vec<Vec<f64>>,
    lower: Vec<Vec<f64>>,
    upper: Vec<Vec<f64>>,
}

fn point_samples(data: &SortedDataset, m: usize, seed: u64, times: &[f64], bounds: bool) -> Result<PointSamples> {
    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| times[i]).collect();
    let mut out = PointSamples {
        interp: vec![Vec::with_capacity(m); times.len()],
        lower: vec![Vec::new(); times.len()],
        upper: vec![Vec::new(); times.len()],
    };
    let mut sampler = Sampler::new(data);
    let mut row = Vec::with_capacity(times.len());
    for j in 0..m as u64 {
        sampler.sample(&mut RngStream::new(seed, j).rng());
        if bounds {
            for (k, &t) in times.iter().enumerate() {
                out.lower[k].push(sampler.draw().lower_survival_at(data, t));
                out.upper[k].push(sampler.draw().upper_survival_at(data, t));
            }
        }
        sampler.interp_in_place()?.eval_sorted(&sorted, &mut row);
        for (&k, &v) in order.iter().zip(&row) {
            out.interp[k].push(v);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CiCell {
    /// Percent of replications with the truth below the lower limit.
    pub lower_pct: f64,
    /// Percent of replications with the truth above the upper limit.
    pub upper_pct: f64,
    pub width: f64,
}

impl CiCell {
    pub fn two_sided_pct(&self) -> f64 {
        self.lower_pct + self.upper_pct
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodRow<T> {
    pub method: String,
    pub cells: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CiResult {
    pub scenario: String,
    pub times: Vec<f64>,
    pub rows: Vec<MethodRow<CiCell>>,
    pub reps: usize,
    /// Replications without any failure, where the log-linear curve is undefined.
    pub skipped: usize,
    pub m: usize,
    pub level: f64,
    pub seed: u64,
}

impl CiResult {
    pub fn row(&self, method: &str) -> Option<&MethodRow<CiCell>> {
        self.rows.iter().find(|r| r.method == method)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("method");
        for t in &self.times {
            write!(s, ",L@{t},U@{t},W@{t}").unwrap();
        }
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.method);
            for c in &r.cells {
                write!(s, ",{:.2},{:.2},{:.4}", c.lower_pct, c.upper_pct, c.width).unwrap();
            }
            s.push('\n');
        }
        s
    }
}

fn first_group(spec: &ScenarioSpec) -> Result<&GroupSpec> {
    spec.validate()?;
    Ok(&spec.groups[0])
}

fn check_reps(reps: usize, m: usize) -> Result<()> {
    if reps == 0 || m == 0 {
        return Err(Error::InvalidArgument("reps and m must be positive".into()));
    }
    Ok(())
}

/// Pointwise interval error rates and widths for both fiducial flavors.
pub fn run_ci_experiment(
    spec: &ScenarioSpec,
    times: &[f64],
    reps: usize,
    m: usize,
    level: f64,
    seed: u64,
) -> Result<CiResult> {
    let group = first_group(spec)?;
    check_reps(reps, m)?;
    let truth: Vec<f64> = times.iter().map(|&t| group.failure.survival(t)).collect();
    // per rep: Some([(below, above, width); 2 flavors x times])
    let per_rep: Vec<Option<Vec<[(bool, bool, f64); 2]>>> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let data = rep_dataset(group, seed, TAG_DATA, r);
            let samples = match point_samples(&data, m, derive_seed(seed, TAG_GFD, r), times, true) {
                Ok(s) => s,
                Err(Error::NoFailures) => return None,
                Err(e) => panic!("unexpected sampler error: {e}"),
            };
            Some(
                (0..times.len())
                    .map(|k| {
                        let iv = interval_from_samples(&samples.interp[k], &samples.interp[k], level);
                        let cv = interval_from_samples(&samples.lower[k], &samples.upper[k], level);
                        let s = truth[k];
                        [(s < iv.lower, s > iv.upper, iv.width()), (s < cv.lower, s > cv.upper, cv.width())]
                    })
                    .collect(),
            )
        })
        .collect();

    let used: Vec<&Vec<[(bool, bool, f64); 2]>> = per_rep.iter().flatten().collect();
    let n = used.len().max(1) as f64;
    let rows = ["FD-I", "FD-C"]
        .iter()
        .enumerate()
        .map(|(f, name)| MethodRow {
            method: name.to_string(),
            cells: (0..times.len())
                .map(|k| {
                    let (mut lo, mut hi, mut w) = (0usize, 0usize, 0.0);
                    for rep in &used {
                        let (b, a, width) = rep[k][f];
                        lo += b as usize;
                        hi += a as usize;
                        w += width;
                    }
                    CiCell { lower_pct: 100.0 * lo as f64 / n, upper_pct: 100.0 * hi as f64 / n, width: w / n }
                })
                .collect(),
        })
        .collect();
    Ok(CiResult {
        scenario: spec.name.clone(),
        times: times.to_vec(),
        rows,
        reps,
        skipped: reps - used.len(),
        m,
        level,
        seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MseResult {
    pub scenario: String,
    pub survival_levels: Vec<f64>,
    pub times: Vec<f64>,
    /// Raw mean squared errors.
    pub rows: Vec<MethodRow<f64>>,
    pub reps: usize,
    pub skipped: usize,
    pub m: usize,
    pub seed: u64,
}

impl MseResult {
    pub fn row(&self, method: &str) -> Option<&MethodRow<f64>> {
        self.rows.iter().find(|r| r.method == method)
    }

    /// MSE table scaled by 1000.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("method");
        for p in &self.survival_levels {
            write!(s, ",S={p}").unwrap();
        }
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.method);
            for v in &r.cells {
                write!(s, ",{:.3}", v * 1000.0).unwrap();
            }
            s.push('\n');
        }
        s
    }
}

/// MSE of the fiducial median and the three Kaplan-Meier variants at the times
/// where the true survival equals each level.
pub fn run_mse_experiment(
    spec: &ScenarioSpec,
    survival_levels: &[f64],
    reps: usize,
    m: usize,
    seed: u64,
) -> Result<MseResult> {
    let group = first_group(spec)?;
    check_reps(reps, m)?;
    let times = survival_levels.iter().map(|&p| group.failure.inverse_survival(p)).collect::<Result<Vec<_>>>()?;
    let tails = [TailConvention::Kml, TailConvention::Kmm, TailConvention::Kmh];
    let per_rep: Vec<Option<Vec<[f64; 4]>>> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let data = rep_dataset(group, seed, TAG_DATA, r);
            let mut samples = match point_samples(&data, m, derive_seed(seed, TAG_GFD, r), &times, false) {
                Ok(s) => s,
                Err(Error::NoFailures) => return None,
                Err(e) => panic!("unexpected sampler error: {e}"),
            };
            let km: Vec<StepCurve> = tails.iter().map(|&t| kaplan_meier_with_tail(&data, t)).collect();
            Some(
                (0..times.len())
                    .map(|k| {
                        let t = times[k];
                        let s = survival_levels[k];
                        let fd = median_in_place(&mut samples.interp[k]);
                        [fd - s, km[0].eval(t) - s, km[1].eval(t) - s, km[2].eval(t) - s]
                    })
                    .collect(),
            )
        })
        .collect();
    let used: Vec<&Vec<[f64; 4]>> = per_rep.iter().flatten().collect();
    let n = used.len().max(1) as f64;
    let rows = ["FD-I", "KML", "KMM", "KMH"]
        .iter()
        .enumerate()
        .map(|(e, name)| MethodRow {
            method: name.to_string(),
            cells: (0..times.len())
                .map(|k| used.iter().map(|rep| rep[k][e] * rep[k][e]).sum::<f64>() / n)
                .collect(),
        })
        .collect();
    Ok(MseResult {
        scenario: spec.name.clone(),
        survival_levels: survival_levels.to_vec(),
        times,
        rows,
        reps,
        skipped: reps - used.len(),
        m,
        seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerResult {
    pub scenario: String,
    pub tests: Vec<String>,
    /// Percent of replications with `p < alpha`, parallel to `tests`.
    pub rejection_pct: Vec<f64>,
    pub reps: usize,
    pub m: usize,
    pub alpha: f64,
    pub seed: u64,
}

impl PowerResult {
    pub fn pct(&self, test: &str) -> Option<f64> {
        self.tests.iter().position(|t| t == test).map(|i| self.rejection_pct[i])
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.tests.join(",");
        s.push('\n');
        let cells: Vec<String> = self.rejection_pct.iter().map(|p| format!("{p:.1}")).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
        s
    }
}

/// p-value of the fiducial two-sample test with `delta0 = 0`.
pub fn fiducial_two_sample_p(a: &SortedDataset, b: &SortedDataset, m: usize, seed_a: u64, seed_b: u64) -> Result<f64> {
    let window = EvaluationWindow::for_pair(a, b, None)?;
    let grid = window.grid();
    let ma = interp_grid_matrix(a, m, seed_a, grid)?;
    let mb = interp_grid_matrix(b, m, seed_b, grid)?;
    let diff = GridMatrix::new(m, grid.len(), ma.values.iter().zip(&mb.values).map(|(x, y)| x - y).collect());
    let (l, l0) = paired_difference_statistics(&diff, &vec![0.0; grid.len()]);
    Ok(exceedance_p_value(&l, l0))
}

/// Rejection rates of the fiducial two-sample test and the twelve log-rank
/// variants. A replication where either group has no failure counts as a
/// non-rejection for the fiducial test.
pub fn run_power_experiment(spec: &ScenarioSpec, reps: usize, m: usize, alpha: f64, seed: u64) -> Result<PowerResult> {
    spec.validate()?;
    if spec.groups.len() != 2 {
        return Err(Error::InvalidScenario("a power study needs two groups".into()));
    }
    check_reps(reps, m)?;
    let per_rep: Vec<Vec<bool>> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let (a, b) = rep_pair(spec, seed, r);
            let fid = match fiducial_two_sample_p(&a, &b, m, derive_seed(seed, TAG_GFD, r), derive_seed(seed, TAG_GFD_B, r)) {
                Ok(p) => p < alpha,
                Err(Error::NoFailures) => false,
                Err(e) => panic!("unexpected error: {e}"),
            };
            let mut out = vec![fid];
            match all_variants(&a, &b) {
                Ok(results) => out.extend(results.iter().map(|x| x.p_value < alpha)),
                Err(_) => out.extend([false; 12]),
            }
            out
        })
        .collect();
    let mut tests = vec!["Fiducial".to_string()];
    tests.extend(VARIANT_NAMES.iter().map(|s| s.to_string()));
    let rejection_pct = (0..tests.len())
        .map(|i| 100.0 * per_rep.iter().filter(|r| r[i]).count() as f64 / reps as f64)
        .collect();
    Ok(PowerResult { scenario: spec.name.clone(), tests, rejection_pct, reps, m, alpha, seed })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageResult {
    pub scenario: String,
    pub what: String,
    pub coverage_pct: f64,
    pub mean_size: f64,
    pub reps: usize,
    pub skipped: usize,
    pub m: usize,
    pub level: f64,
    pub seed: u64,
}

impl CoverageResult {
    pub fn to_csv(&self) -> String {
        format!(
            "what,coverage_pct,mean_size,reps,skipped\n{},{:.2},{:.5},{},{}\n",
            self.what, self.coverage_pct, self.mean_size, self.reps, self.skipped
        )
    }
}

fn coverage_result(
    spec: &ScenarioSpec,
    what: &str,
    per_rep: Vec<Option<(bool, f64)>>,
    m: usize,
    level: f64,
    seed: u64,
) -> CoverageResult {
    let reps = per_rep.len();
    let used: Vec<(bool, f64)> = per_rep.into_iter().flatten().collect();
    let n = used.len().max(1) as f64;
    CoverageResult {
        scenario: spec.name.clone(),
        what: what.into(),
        coverage_pct: 100.0 * used.iter().filter(|u| u.0).count() as f64 / n,
        mean_size: used.iter().map(|u| u.1).sum::<f64>() / n,
        reps,
        skipped: reps - used.len(),
        m,
        level,
        seed,
    }
}

/// Share of replications whose curvewise band contains the true survival on
/// `[0, tau]`, `tau` = largest failure time. `mean_size` is the mean radius.
pub fn run_band_experiment(spec: &ScenarioSpec, reps: usize, m: usize, level: f64, seed: u64) -> Result<CoverageResult> {
    let group = first_group(spec)?;
    check_reps(reps, m)?;
    let per_rep = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let data = rep_dataset(group, seed, TAG_DATA, r);
            let window = EvaluationWindow::for_dataset(&data, None).ok()?;
            let mat = match interp_grid_matrix(&data, m, derive_seed(seed, TAG_GFD, r), window.grid()) {
                Ok(mat) => mat,
                Err(Error::NoFailures) => return None,
                Err(e) => panic!("unexpected sampler error: {e}"),
            };
            let center = mat.column_medians();
            let l: Vec<f64> = (0..m).map(|j| grid_sup_deviation(mat.row(j), &center, Sidedness::Two)).collect();
            let radius = empirical_quantile(&l, level);
            let center_curve = StepCurve::from_steps(window.grid().iter().copied().zip(center));
            let dist = sup_distance(&SurvivalCurve(&group.failure), &center_curve, &window);
            Some((dist <= radius, radius))
        })
        .collect();
    Ok(coverage_result(spec, "band", per_rep, m, level, seed))
}

/// Coverage of the interval for the time where survival falls to `q`.
/// `mean_size` is the mean width over replications with a closed upper limit.
pub fn run_quantile_experiment(
    spec: &ScenarioSpec,
    q: f64,
    reps: usize,
    m: usize,
    level: f64,
    seed: u64,
) -> Result<CoverageResult> {
    let group = first_group(spec)?;
    check_reps(reps, m)?;
    let truth = group.failure.inverse_survival(q)?;
    let per_rep = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let data = rep_dataset(group, seed, TAG_DATA, r);
            let mut sampler = Sampler::new(&data);
            let mut inv = Vec::with_capacity(m);
            for j in 0..m as u64 {
                sampler.sample(&mut RngStream::new(derive_seed(seed, TAG_GFD, r), j).rng());
                let curve = match sampler.interp_in_place() {
                    Ok(c) => c,
                    Err(_) => return None,
                };
                inv.push(curve.invert(q).unwrap_or(f64::INFINITY));
            }
            let iv = interval_from_samples(&inv, &inv, level);
            Some((iv.contains(truth), if iv.upper.is_finite() { iv.width() } else { 0.0 }))
        })
        .collect();
    Ok(coverage_result(spec, "quantile", per_rep, m, level, seed))
}

/// Rejection rate of the one-sample test of the true survival curve.
pub fn run_one_sample_experiment(
    spec: &ScenarioSpec,
    reps: usize,
    m: usize,
    alpha: f64,
    seed: u64,
) -> Result<CoverageResult> {
    let group = first_group(spec)?;
    check_reps(reps, m)?;
    let truth: &Distribution = &group.failure;
    let per_rep = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let data = rep_dataset(group, seed, TAG_DATA, r);
            let window = EvaluationWindow::for_dataset(&data, None).ok()?;
            let mat = interp_grid_matrix(&data, m, derive_seed(seed, TAG_GFD, r), window.grid()).ok()?;
            let center = mat.column_medians();
            let l: Vec<f64> = (0..m).map(|j| grid_sup_deviation(mat.row(j), &center, Sidedness::Two)).collect();
            let center_curve = StepCurve::from_steps(window.grid().iter().copied().zip(center));
            let l0 = sup_distance(&SurvivalCurve(truth), &center_curve, &window);
            let p = exceedance_p_value(&l, l0);
            Some((p < alpha, p))
        })
        .collect();
    Ok(coverage_result(spec, "one_sample_rejection", per_rep, m, 1.0 - alpha, seed))
}
