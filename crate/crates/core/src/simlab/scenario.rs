use rand::Rng;
use serde::{Deserialize, Serialize};

use super::dist::{Distribution, MixtureComponent};
use crate::dataset::{Record, Status, SurvivalDataset};
use crate::error::{Error, Result};

/// One sample: `n` pairs of independent failure and censoring times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub n: usize,
    pub failure: Distribution,
    pub censoring: Distribution,
}

impl GroupSpec {
    pub fn new(n: usize, failure: Distribution, censoring: Distribution) -> Self {
        GroupSpec { n, failure, censoring }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub name: String,
    pub groups: Vec<GroupSpec>,
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        if self.groups.is_empty() || self.groups.len() > 2 {
            return Err(Error::InvalidScenario(format!("expected 1 or 2 groups, got {}", self.groups.len())));
        }
        for g in &self.groups {
            if g.n == 0 {
                return Err(Error::InvalidScenario("group size must be positive".into()));
            }
            g.failure.validate()?;
            g.censoring.validate()?;
            if matches!(g.failure, Distribution::Never) {
                return Err(Error::InvalidScenario("failures must be possible".into()));
            }
        }
        Ok(())
    }
}

/// `y = min(x, z)`, `failed = x <= z`.
pub fn sample_group<R: Rng + ?Sized>(group: &GroupSpec, rng: &mut R) -> (Vec<f64>, Vec<bool>) {
    let mut times = Vec::with_capacity(group.n);
    let mut failed = Vec::with_capacity(group.n);
    for _ in 0..group.n {
        let x = group.failure.sample(rng);
        let z = group.censoring.sample(rng);
        times.push(x.min(z));
        failed.push(x <= z);
    }
    (times, failed)
}

/// Draws a dataset; two-group scenarios label records `A` and `B`.
pub fn sample_scenario<R: Rng + ?Sized>(spec: &ScenarioSpec, rng: &mut R) -> Result<SurvivalDataset> {
    spec.validate()?;
    let labelled = spec.groups.len() > 1;
    let mut records = Vec::new();
    for (g, label) in spec.groups.iter().zip(["A", "B"]) {
        let (times, failed) = sample_group(g, rng);
        records.extend(times.into_iter().zip(failed).map(|(time, f)| Record {
            time,
            status: if f { Status::Failure } else { Status::Censored },
            group: labelled.then(|| label.to_string()),
        }));
    }
    SurvivalDataset::new(records)
}

fn exp(mean: f64) -> Distribution {
    Distribution::Exponential { mean }
}

fn weibull(shape: f64, scale: f64) -> Distribution {
    Distribution::Weibull { shape, scale }
}

fn uniform(low: f64, high: f64) -> Distribution {
    Distribution::Uniform { low, high }
}

fn half_normal() -> Distribution {
    Distribution::HalfNormal { sigma: 1.0 }
}

fn one(name: &str, g: GroupSpec) -> ScenarioSpec {
    ScenarioSpec { name: name.into(), groups: vec![g] }
}

fn two(name: &str, a: GroupSpec, b: GroupSpec) -> ScenarioSpec {
    ScenarioSpec { name: name.into(), groups: vec![a, b] }
}

/// Exponential (mean 10) failures, U(0, 5) censoring, n = 30.
pub fn table1() -> ScenarioSpec {
    one("table1", GroupSpec::new(30, exp(10.0), uniform(0.0, 5.0)))
}

/// Two-component exponential mixture, U(2, 8) censoring, n = 34.
pub fn table2() -> ScenarioSpec {
    let mix = Distribution::ExpMixture {
        components: vec![
            MixtureComponent { weight: 0.187, mean: 0.227 },
            MixtureComponent { weight: 0.813, mean: 22.44 },
        ],
    };
    one("table2", GroupSpec::new(34, mix, uniform(2.0, 8.0)))
}

/// Exponential (mean 1) failures, U(0, 5) censoring, n = 25.
pub fn table3() -> ScenarioSpec {
    one("table3", GroupSpec::new(25, exp(1.0), uniform(0.0, 5.0)))
}

/// Null: identical Weibull failures under different censoring.
pub fn table4() -> ScenarioSpec {
    two(
        "table4",
        GroupSpec::new(200, weibull(2.0, 1.0), half_normal()),
        GroupSpec::new(200, weibull(2.0, 1.0), exp(1.0)),
    )
}

pub fn table5() -> ScenarioSpec {
    two(
        "table5",
        GroupSpec::new(200, exp(30.0), exp(30.0)),
        GroupSpec::new(200, weibull(30.0, 20.0), exp(30.0)),
    )
}

pub fn table6() -> ScenarioSpec {
    two(
        "table6",
        GroupSpec::new(200, weibull(30.0, 20.0), uniform(0.0, 80.0)),
        GroupSpec::new(200, weibull(20.0, 20.0), uniform(0.0, 80.0)),
    )
}

pub fn table7() -> ScenarioSpec {
    two(
        "table7",
        GroupSpec::new(200, exp(1.0), half_normal()),
        GroupSpec::new(200, half_normal(), weibull(2.0, 1.0)),
    )
}

/// Weibull (scale 20, shape 10) failures, exponential (mean 20) censoring, n = 300.
pub fn fig2() -> ScenarioSpec {
    one("fig2", GroupSpec::new(300, weibull(10.0, 20.0), exp(20.0)))
}

pub fn preset(name: &str) -> Option<ScenarioSpec> {
    Some(match name {
        "table1" => table1(),
        "table2" => table2(),
        "table3" => table3(),
        "table4" => table4(),
        "table5" => table5(),
        "table6" => table6(),
        "table7" => table7(),
        "fig2" => fig2(),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    fn censoring_fraction(g: &GroupSpec, reps: usize) -> f64 {
        let mut rng = RngStream::new(77, 0).rng();
        let mut censored = 0;
        for _ in 0..reps {
            let (_, failed) = sample_group(g, &mut rng);
            censored += failed.iter().filter(|f| !**f).count();
        }
        censored as f64 / (reps * g.n) as f64
    }

    #[test]
    fn first_scenario_censoring_matches_closed_form() {
        // P(X <= Z) = 1 - 2 (1 - exp(-1/2))
        let p_fail = 1.0 - 2.0 * (1.0 - (-0.5f64).exp());
        let c = censoring_fraction(&table1().groups[0], 2000);
        assert!((c - (1.0 - p_fail)).abs() < 0.005, "{c}");
    }

    #[test]
    fn reported_censoring_fractions() {
        let c = censoring_fraction(&fig2().groups[0], 300);
        assert!((c - 0.6).abs() < 0.03, "{c}");
        let t6 = table6();
        assert!((censoring_fraction(&t6.groups[0], 200) - 0.25).abs() < 0.03);
        assert!((censoring_fraction(&t6.groups[1], 200) - 0.24).abs() < 0.03);
        let t5 = table5();
        assert!((censoring_fraction(&t5.groups[0], 200) - 0.5).abs() < 0.03);
        assert!((censoring_fraction(&t5.groups[1], 200) - 0.48).abs() < 0.03);
    }

    #[test]
    fn never_censored() {
        let g = GroupSpec::new(50, exp(1.0), Distribution::Never);
        let (_, failed) = sample_group(&g, &mut RngStream::new(1, 1).rng());
        assert!(failed.iter().all(|f| *f));
    }

    #[test]
    fn two_groups_are_labelled() {
        let d = sample_scenario(&table4(), &mut RngStream::new(3, 0).rng()).unwrap();
        let groups = d.split_by_group();
        assert_eq!(groups.len(), 2);
        assert_eq!(groups["A"].len(), 200);
    }
}
