use rand::Rng;
use rand_distr::{Distribution as _, Exp, StandardNormal, Weibull};
use serde::{Deserialize, Serialize};

use crate::curve::{Curve, Shape};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub mean: f64,
}

/// Failure or censoring time distribution. Every parameter is named: the
/// exponential is given by its mean, the Weibull by shape and scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Distribution {
    Exponential { mean: f64 },
    /// `S(t) = exp(-(t / scale)^shape)`.
    Weibull { shape: f64, scale: f64 },
    Uniform { low: f64, high: f64 },
    /// `|N(0, sigma^2)|`.
    HalfNormal { sigma: f64 },
    ExpMixture { components: Vec<MixtureComponent> },
    /// Never occurs; used as "no censoring".
    Never,
}

impl Distribution {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));
        match self {
            Distribution::Exponential { mean } if !(*mean > 0.0 && mean.is_finite()) => {
                bad(format!("exponential mean must be positive, got {mean}"))
            }
            Distribution::Weibull { shape, scale } if !(*shape > 0.0 && *scale > 0.0) => {
                bad(format!("weibull shape and scale must be positive, got {shape}, {scale}"))
            }
            Distribution::Uniform { low, high } if !(*low >= 0.0 && high > low) => {
                bad(format!("uniform needs 0 <= low < high, got {low}, {high}"))
            }
            Distribution::HalfNormal { sigma } if *sigma <= 0.0 || sigma.is_nan() => {
                bad(format!("half-normal sigma must be positive, got {sigma}"))
            }
            Distribution::ExpMixture { components } => {
                if components.is_empty() || components.iter().any(|c| !(c.weight > 0.0 && c.mean > 0.0)) {
                    return bad("mixture components need positive weights and means".into());
                }
                let total: f64 = components.iter().map(|c| c.weight).sum();
                if (total - 1.0).abs() > 1e-9 {
                    return bad(format!("mixture weights sum to {total}, not 1"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Distribution::Exponential { mean } => mean * rng.sample::<f64, _>(rand_distr::Exp1),
            Distribution::Weibull { shape, scale } => {
                Weibull::new(*scale, *shape).expect("validated parameters").sample(rng)
            }
            Distribution::Uniform { low, high } => rng.random_range(*low..*high),
            Distribution::HalfNormal { sigma } => sigma * rng.sample::<f64, _>(StandardNormal).abs(),
            Distribution::ExpMixture { components } => {
                let mut v = rng.random::<f64>();
                let last = components.len() - 1;
                for (i, c) in components.iter().enumerate() {
                    if v < c.weight || i == last {
                        return Exp::new(1.0 / c.mean).expect("validated parameters").sample(rng);
                    }
                    v -= c.weight;
                }
                unreachable!()
            }
            Distribution::Never => f64::INFINITY,
        }
    }

    pub fn survival(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 1.0;
        }
        match self {
            Distribution::Exponential { mean } => (-t / mean).exp(),
            Distribution::Weibull { shape, scale } => (-(t / scale).powf(*shape)).exp(),
            Distribution::Uniform { low, high } => ((high - t) / (high - low)).clamp(0.0, 1.0),
            Distribution::HalfNormal { sigma } => statrs::function::erf::erfc(t / (sigma * std::f64::consts::SQRT_2)),
            Distribution::ExpMixture { components } => {
                components.iter().map(|c| c.weight * (-t / c.mean).exp()).sum()
            }
            Distribution::Never => 1.0,
        }
    }

    pub fn cdf(&self, t: f64) -> f64 {
        1.0 - self.survival(t)
    }

    /// Time at which survival equals `p`.
    pub fn inverse_survival(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidArgument(format!("survival level must lie in (0, 1), got {p}")));
        }
        Ok(match self {
            Distribution::Exponential { mean } => -mean * p.ln(),
            Distribution::Weibull { shape, scale } => scale * (-p.ln()).powf(1.0 / shape),
            Distribution::Uniform { low, high } => high - p * (high - low),
            Distribution::Never => return Err(Error::NonIdentifiable(p)),
            _ => {
                let (mut lo, mut hi) = (0.0, 1.0);
                while self.survival(hi) > p {
                    hi *= 2.0;
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if self.survival(mid) > p {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
        })
    }
}

/// The survival function of a distribution, as a curve.
#[derive(Debug, Clone, Copy)]
pub struct SurvivalCurve<'a>(pub &'a Distribution);

impl Curve for SurvivalCurve<'_> {
    fn eval(&self, t: f64) -> f64 {
        self.0.survival(t)
    }

    fn breakpoints(&self, lo: f64, hi: f64, out: &mut Vec<f64>) {
        if let Distribution::Uniform { low, high } = self.0 {
            out.extend([*low, *high].into_iter().filter(|&k| k > lo && k < hi));
        }
    }

    fn shape_on(&self, _a: f64, _b: f64) -> Shape {
        Shape::Monotone
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    fn all() -> Vec<Distribution> {
        vec![
            Distribution::Exponential { mean: 10.0 },
            Distribution::Weibull { shape: 2.0, scale: 1.0 },
            Distribution::Uniform { low: 2.0, high: 8.0 },
            Distribution::HalfNormal { sigma: 1.0 },
            Distribution::ExpMixture {
                components: vec![
                    MixtureComponent { weight: 0.187, mean: 0.227 },
                    MixtureComponent { weight: 0.813, mean: 22.44 },
                ],
            },
        ]
    }

    #[test]
    fn inverse_survival_roundtrip() {
        for d in all() {
            d.validate().unwrap();
            for p in [0.99, 0.75, 0.5, 0.1] {
                let t = d.inverse_survival(p).unwrap();
                assert!((d.survival(t) - p).abs() < 1e-10, "{d:?} {p}");
            }
        }
    }

    #[test]
    fn sample_means() {
        let mut rng = RngStream::new(1, 0).rng();
        let d = Distribution::Exponential { mean: 10.0 };
        let mean: f64 = (0..100_000).map(|_| d.sample(&mut rng)).sum::<f64>() / 1e5;
        assert!((mean - 10.0).abs() < 0.15);
        let w = Distribution::Weibull { shape: 2.0, scale: 1.0 };
        let mean: f64 = (0..100_000).map(|_| w.sample(&mut rng)).sum::<f64>() / 1e5;
        assert!((mean - 0.886_226_925).abs() < 0.01);
    }

    #[test]
    fn serde_tags() {
        let d: Distribution = toml::from_str("family = \"weibull\"\nshape = 10.0\nscale = 20.0").unwrap();
        assert_eq!(d, Distribution::Weibull { shape: 10.0, scale: 20.0 });
        assert!(Distribution::ExpMixture { components: vec![MixtureComponent { weight: 0.5, mean: 1.0 }] }
            .validate()
            .is_err());
    }
}
