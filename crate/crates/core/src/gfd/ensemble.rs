use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampler::{draw_bounds, Sampler};
use crate::curve::{EvaluationWindow, LogLinearCurve, StepCurve};
use crate::dataset::SortedDataset;
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// One fiducial draw in curve form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiducialCurves {
    pub lower: StepCurve,
    pub upper: StepCurve,
    pub interp: LogLinearCurve,
}

/// `m` independent fiducial draws of the survival function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiducialEnsemble {
    seed: u64,
    fingerprint: String,
    tau: f64,
    knots: Vec<f64>,
    draws: Vec<FiducialCurves>,
}

const ENVELOPE_TOL: f64 = 1e-12;

impl FiducialEnsemble {
    /// Assembles an ensemble, checking `S^L <= S^I <= S^U` at every knot.
    pub fn new(
        draws: Vec<FiducialCurves>,
        knots: Vec<f64>,
        tau: f64,
        seed: u64,
        fingerprint: String,
    ) -> Result<Self> {
        if draws.is_empty() {
            return Err(Error::InvalidArgument("an ensemble needs at least one draw".into()));
        }
        for (j, d) in draws.iter().enumerate() {
            for &t in std::iter::once(&0.0).chain(&knots) {
                let s = d.interp.eval(t);
                if d.lower.eval(t) > s + ENVELOPE_TOL || s > d.upper.eval(t) + ENVELOPE_TOL {
                    return Err(Error::InvalidArgument(format!("draw {j} violates the envelope ordering at t = {t}")));
                }
            }
        }
        Ok(FiducialEnsemble { seed, fingerprint, tau, knots, draws })
    }

    pub fn m(&self) -> usize {
        self.draws.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn draws(&self) -> &[FiducialCurves] {
        &self.draws
    }

    /// Distinct observation times of the source dataset.
    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Default window: `tau` = largest failure time, grid = observation times.
    pub fn default_window(&self) -> EvaluationWindow {
        EvaluationWindow::new(self.tau, self.knots.iter().copied()).expect("tau validated at sampling")
    }

    /// Window with the given `tau` (or the default) whose grid holds every knot.
    pub fn window(&self, tau: Option<f64>) -> Result<EvaluationWindow> {
        EvaluationWindow::new(tau.unwrap_or(self.tau), self.knots.iter().copied())
    }

    pub fn lower_curves(&self) -> Vec<&StepCurve> {
        self.draws.iter().map(|d| &d.lower).collect()
    }

    pub fn upper_curves(&self) -> Vec<&StepCurve> {
        self.draws.iter().map(|d| &d.upper).collect()
    }

    pub fn interp_curves(&self) -> Vec<&LogLinearCurve> {
        self.draws.iter().map(|d| &d.interp).collect()
    }

    /// `S^I_j(g_k)` as a row-major `m x grid.len()` matrix.
    pub fn interp_matrix(&self, grid: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.m() * grid.len());
        for d in &self.draws {
            out.extend(grid.iter().map(|&g| d.interp.eval(g)));
        }
        out
    }
}

/// Samples `m` fiducial draws; draw `i` uses stream `(seed, i)`, so the result
/// is identical for any worker count.
pub fn sample_ensemble(data: &SortedDataset, m: usize, seed: u64) -> Result<FiducialEnsemble> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let tau = data.max_failure_time().ok_or(Error::NoFailures)?;
    let draws = (0..m as u64)
        .into_par_iter()
        .map_init(
            || Sampler::new(data),
            |sampler, i| {
                let mut rng = RngStream::new(seed, i).rng();
                sampler.sample(&mut rng);
                let (lower, upper) = draw_bounds(sampler.draw(), data)?;
                let interp = sampler.interp()?;
                Ok(FiducialCurves { lower, upper, interp })
            },
        )
        .collect::<Result<Vec<_>>>()?;
    // a dataset whose failures all sit at t = 0 has no usable window
    let tau = if tau > 0.0 { tau } else { data.max_time().max(f64::MIN_POSITIVE) };
    FiducialEnsemble::new(draws, data.distinct_times(), tau, seed, data.fingerprint().to_string())
}
