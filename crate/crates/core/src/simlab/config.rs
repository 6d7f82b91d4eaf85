//! Experiment configuration files (TOML or JSON).

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::experiment::{
    run_band_experiment, run_ci_experiment, run_mse_experiment, run_one_sample_experiment,
    run_power_experiment, run_quantile_experiment, CiResult, CoverageResult, MseResult, PowerResult,
};
use super::scenario::{preset, GroupSpec, ScenarioSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Ci,
    Mse,
    Power,
    Band,
    Quantile,
    OneSample,
}

fn default_seed() -> u64 {
    1
}
fn default_m() -> usize {
    1000
}
fn default_level() -> f64 {
    0.95
}
fn default_alpha() -> f64 {
    0.05
}
fn default_q() -> f64 {
    0.5
}

/// A scenario is either a named preset or explicit groups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub groups: Vec<GroupSpec>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub reps: usize,
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default = "default_level")]
    pub level: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub times: Vec<f64>,
    #[serde(default)]
    pub survival_levels: Vec<f64>,
    #[serde(default = "default_q")]
    pub q: f64,
}

impl ExperimentConfig {
    pub fn parse(text: &str, json: bool) -> Result<Self> {
        if json {
            serde_json::from_str(text).map_err(|e| Error::InvalidScenario(e.to_string()))
        } else {
            toml::from_str(text).map_err(|e| Error::InvalidScenario(e.to_string()))
        }
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text, path.extension().is_some_and(|e| e == "json"))
    }

    pub fn scenario(&self) -> Result<ScenarioSpec> {
        let mut spec = match (&self.preset, self.groups.is_empty()) {
            (Some(p), true) => preset(p).ok_or_else(|| Error::InvalidScenario(format!("unknown preset `{p}`")))?,
            (None, false) => ScenarioSpec { name: String::new(), groups: self.groups.clone() },
            (Some(_), false) => return Err(Error::InvalidScenario("give either `preset` or `groups`, not both".into())),
            (None, true) => return Err(Error::InvalidScenario("no `preset` or `groups` given".into())),
        };
        if let Some(name) = &self.name {
            spec.name = name.clone();
        }
        if spec.name.is_empty() {
            spec.name = "custom".into();
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn run(&self) -> Result<ExperimentResult> {
        let spec = self.scenario()?;
        Ok(match self.kind {
            ExperimentKind::Ci => {
                if self.times.is_empty() {
                    return Err(Error::InvalidScenario("a ci experiment needs `times`".into()));
                }
                ExperimentResult::Ci(run_ci_experiment(&spec, &self.times, self.reps, self.m, self.level, self.seed)?)
            }
            ExperimentKind::Mse => {
                if self.survival_levels.is_empty() {
                    return Err(Error::InvalidScenario("an mse experiment needs `survival_levels`".into()));
                }
                ExperimentResult::Mse(run_mse_experiment(&spec, &self.survival_levels, self.reps, self.m, self.seed)?)
            }
            ExperimentKind::Power => {
                ExperimentResult::Power(run_power_experiment(&spec, self.reps, self.m, self.alpha, self.seed)?)
            }
            ExperimentKind::Band => {
                ExperimentResult::Coverage(run_band_experiment(&spec, self.reps, self.m, self.level, self.seed)?)
            }
            ExperimentKind::Quantile => ExperimentResult::Coverage(run_quantile_experiment(
                &spec, self.q, self.reps, self.m, self.level, self.seed,
            )?),
            ExperimentKind::OneSample => {
                ExperimentResult::Coverage(run_one_sample_experiment(&spec, self.reps, self.m, self.alpha, self.seed)?)
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExperimentResult {
    Ci(CiResult),
    Mse(MseResult),
    Power(PowerResult),
    Coverage(CoverageResult),
}

impl ExperimentResult {
    pub fn to_csv(&self) -> String {
        match self {
            ExperimentResult::Ci(r) => r.to_csv(),
            ExperimentResult::Mse(r) => r.to_csv(),
            ExperimentResult::Power(r) => r.to_csv(),
            ExperimentResult::Coverage(r) => r.to_csv(),
        }
    }
}
