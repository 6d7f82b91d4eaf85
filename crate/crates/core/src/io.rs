//! CSV and JSON serialization of curves, estimates, bands and ensembles.
//!
//! Floats are written with Rust's shortest round-trip formatting, so output is
//! a pure function of the values.

use std::fmt::Write as _;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::curve::{LogLinearCurve, StepCurve};
use crate::dataset::{parse_dataset, FormatOptions, SurvivalDataset};
use crate::error::{Error, Result};
use crate::estimate::EstimateWithVariance;
use crate::gfd::FiducialEnsemble;
use crate::infer::ConfidenceBand;

pub fn read_dataset(path: &Path, options: &FormatOptions) -> Result<SurvivalDataset> {
    let file = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_dataset(BufReader::new(file), options)
}

/// Hex SHA-256 of a file's bytes.
pub fn file_sha256(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Generic numeric table with a header row.
pub fn table_csv<R: AsRef<[f64]>>(header: &[&str], rows: impl IntoIterator<Item = R>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.as_ref().iter().map(|v| v.to_string()).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

/// `t,value` rows.
pub fn points_csv(points: impl IntoIterator<Item = (f64, f64)>) -> String {
    let mut s = String::from("t,value\n");
    for (t, v) in points {
        writeln!(s, "{t},{v}").unwrap();
    }
    s
}

pub fn step_curve_csv(curve: &StepCurve) -> String {
    points_csv(curve.points())
}

/// Anchors of a log-linear curve, extended to `tau` along the tail.
pub fn loglinear_points(curve: &LogLinearCurve, tau: f64) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> =
        curve.anchor_times().iter().zip(curve.anchor_logs()).map(|(&t, &l)| (t, l.exp())).collect();
    if pts.last().is_some_and(|&(t, _)| tau > t) {
        pts.push((tau, curve.eval(tau)));
    }
    pts
}

pub fn loglinear_csv(curve: &LogLinearCurve, tau: f64) -> String {
    points_csv(loglinear_points(curve, tau))
}

/// `t,estimate,variance` at every knot.
pub fn estimate_csv(est: &EstimateWithVariance) -> String {
    let mut s = String::from("t,estimate,variance\n");
    for ((t, v), var) in est.curve.points().zip(&est.variance) {
        writeln!(s, "{t},{v},{var}").unwrap();
    }
    s
}

/// `t,lower,center,upper` on the band's grid.
pub fn band_csv(band: &ConfidenceBand) -> String {
    let mut s = String::from("t,lower,center,upper\n");
    for [t, lo, c, hi] in band.grid_rows() {
        writeln!(s, "{t},{lo},{c},{hi}").unwrap();
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    Lower,
    Upper,
    Interp,
}

impl Component {
    pub const ALL: [Component; 3] = [Component::Lower, Component::Upper, Component::Interp];

    pub fn name(self) -> &'static str {
        match self {
            Component::Lower => "lower",
            Component::Upper => "upper",
            Component::Interp => "interp",
        }
    }
}

/// `draw,t,value` rows for the first `limit` draws of one component.
pub fn ensemble_csv(ensemble: &FiducialEnsemble, component: Component, limit: Option<usize>) -> String {
    let tau = ensemble.default_window().tau();
    let mut s = String::from("draw,t,value\n");
    for (j, d) in ensemble.draws().iter().take(limit.unwrap_or(usize::MAX)).enumerate() {
        let pts: Vec<(f64, f64)> = match component {
            Component::Lower => d.lower.points().collect(),
            Component::Upper => d.upper.points().collect(),
            Component::Interp => loglinear_points(&d.interp, tau),
        };
        for (t, v) in pts {
            writeln!(s, "{j},{t},{v}").unwrap();
        }
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleMetadata {
    pub seed: u64,
    pub m: usize,
    pub exported_draws: usize,
    pub fingerprint: String,
    pub tau: f64,
    pub components: Vec<Component>,
}

impl EnsembleMetadata {
    pub fn of(ensemble: &FiducialEnsemble, limit: Option<usize>) -> Self {
        EnsembleMetadata {
            seed: ensemble.seed(),
            m: ensemble.m(),
            exported_draws: limit.map_or(ensemble.m(), |k| k.min(ensemble.m())),
            fingerprint: ensemble.fingerprint().to_string(),
            tau: ensemble.default_window().tau(),
            components: Component::ALL.to_vec(),
        }
    }
}

/// JSON form of a single curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveEnvelope {
    #[serde(rename = "type")]
    pub kind: String,
    pub seed: Option<u64>,
    pub tau: Option<f64>,
    pub knots: Vec<f64>,
    pub values: Vec<f64>,
    /// Log-survival slope past the last anchor (log-linear curves only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_slope: Option<f64>,
}

impl CurveEnvelope {
    pub fn step(curve: &StepCurve, seed: Option<u64>, tau: Option<f64>) -> Self {
        CurveEnvelope {
            kind: "step".into(),
            seed,
            tau,
            knots: curve.knots().to_vec(),
            values: curve.values().to_vec(),
            tail_slope: None,
        }
    }

    pub fn log_linear(curve: &LogLinearCurve, seed: Option<u64>, tau: Option<f64>) -> Self {
        CurveEnvelope {
            kind: "log_linear".into(),
            seed,
            tau,
            knots: curve.anchor_times().to_vec(),
            values: curve.anchor_logs().iter().map(|l| l.exp()).collect(),
            tail_slope: Some(curve.tail_slope()),
        }
    }
}
