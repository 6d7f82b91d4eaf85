//! Weighted two-sample log-rank tests and their supremum versions.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::dataset::SortedDataset;
use crate::error::{Error, Result};

/// Weight applied to each pooled event time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum WeightSpec {
    /// 1.
    LR,
    /// Number at risk (Gehan-Wilcoxon).
    GW,
    /// Square root of the number at risk (Tarone-Ware).
    TW,
    /// Pooled Peto-Peto survival `prod (1 - d / (K + 1))` just before `t`.
    PP,
    /// Peto-Peto survival times `K / (K + 1)`.
    MPP,
    /// Fleming-Harrington `S(t-)^p (1 - S(t-))^q` with pooled Kaplan-Meier `S`.
    FH { p: f64, q: f64 },
}

impl WeightSpec {
    pub const FH_DEFAULT: WeightSpec = WeightSpec::FH { p: 1.0, q: 1.0 };

    pub fn name(&self) -> &'static str {
        match self {
            WeightSpec::LR => "LR",
            WeightSpec::GW => "GW",
            WeightSpec::TW => "TW",
            WeightSpec::PP => "PP",
            WeightSpec::MPP => "MPP",
            WeightSpec::FH { .. } => "FH",
        }
    }

    pub fn all() -> [WeightSpec; 6] {
        [WeightSpec::LR, WeightSpec::GW, WeightSpec::TW, WeightSpec::PP, WeightSpec::MPP, WeightSpec::FH_DEFAULT]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventContribution {
    pub time: f64,
    pub weight: f64,
    /// Unweighted `O_a - E_a`.
    pub observed_minus_expected: f64,
    /// Unweighted hypergeometric variance.
    pub variance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRankResult {
    pub test: String,
    pub statistic: f64,
    pub p_value: f64,
    /// `sum w (O_a - E_a)`.
    pub score: f64,
    /// `sum w^2 V`.
    pub variance: f64,
    pub contributions: Vec<EventContribution>,
}

fn at_risk(times: &[f64], t: f64) -> usize {
    times.len() - times.partition_point(|&y| y < t)
}

fn events_at(data: &SortedDataset, t: f64) -> usize {
    let ev = data.event_times();
    match ev.binary_search_by(|x| x.total_cmp(&t)) {
        Ok(i) => data.event_counts()[i],
        Err(_) => 0,
    }
}

fn contributions(a: &SortedDataset, b: &SortedDataset, w: WeightSpec) -> Result<Vec<EventContribution>> {
    let mut pooled: Vec<f64> = a.event_times().iter().chain(b.event_times()).copied().collect();
    if pooled.is_empty() {
        return Err(Error::NoEvents);
    }
    pooled.sort_by(f64::total_cmp);
    pooled.dedup();

    let mut peto: f64 = 1.0;
    let mut km: f64 = 1.0;
    let mut out = Vec::with_capacity(pooled.len());
    for t in pooled {
        let na = at_risk(a.times(), t) as f64;
        let nb = at_risk(b.times(), t) as f64;
        let da = events_at(a, t) as f64;
        let d = da + events_at(b, t) as f64;
        let n = na + nb;
        let weight = match w {
            WeightSpec::LR => 1.0,
            WeightSpec::GW => n,
            WeightSpec::TW => n.sqrt(),
            WeightSpec::PP => peto,
            WeightSpec::MPP => peto * n / (n + 1.0),
            WeightSpec::FH { p, q } => km.powf(p) * (1.0 - km).powf(q),
        };
        let variance = if n > 1.0 { na * nb * d * (n - d) / (n * n * (n - 1.0)) } else { 0.0 };
        out.push(EventContribution { time: t, weight, observed_minus_expected: da - d * na / n, variance });
        peto *= 1.0 - d / (n + 1.0);
        km *= 1.0 - d / n;
    }
    Ok(out)
}

fn chi_square_sf(x: f64) -> f64 {
    ChiSquared::new(1.0).expect("one degree of freedom").sf(x)
}

pub fn weighted_logrank(a: &SortedDataset, b: &SortedDataset, w: WeightSpec) -> Result<LogRankResult> {
    let contributions = contributions(a, b, w)?;
    let score: f64 = contributions.iter().map(|c| c.weight * c.observed_minus_expected).sum();
    let variance: f64 = contributions.iter().map(|c| c.weight * c.weight * c.variance).sum();
    let (statistic, p_value) =
        if variance > 0.0 { (score * score / variance, chi_square_sf(score * score / variance)) } else { (0.0, 1.0) };
    Ok(LogRankResult { test: w.name().to_string(), statistic, p_value, score, variance, contributions })
}

/// Renyi-type statistic `max_k |sum_{i <= k} w (O - E)| / sqrt(V_total)`.
pub fn sup_logrank(a: &SortedDataset, b: &SortedDataset, w: WeightSpec) -> Result<LogRankResult> {
    let contributions = contributions(a, b, w)?;
    let mut partial: f64 = 0.0;
    let mut peak: f64 = 0.0;
    let mut variance = 0.0;
    for c in &contributions {
        partial += c.weight * c.observed_minus_expected;
        peak = peak.max(partial.abs());
        variance += c.weight * c.weight * c.variance;
    }
    let (statistic, p_value) = if variance > 0.0 {
        let x = peak / variance.sqrt();
        (x, brownian_sup_tail(x))
    } else {
        (0.0, 1.0)
    };
    Ok(LogRankResult { test: format!("S{}", w.name()), statistic, p_value, score: partial, variance, contributions })
}

/// `P(sup_{0 <= s <= 1} |W(s)| >= x)` for standard Brownian motion.
pub fn brownian_sup_tail(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let c = std::f64::consts::PI.powi(2) / (8.0 * x * x);
    let mut sum = 0.0;
    for k in 0..10_000 {
        let j = (2 * k + 1) as f64;
        let term = (-c * j * j).exp() / j;
        sum += if k % 2 == 0 { term } else { -term };
        let j_next = j + 2.0;
        if (-c * j_next * j_next).exp() / j_next < 1e-12 {
            break;
        }
    }
    (1.0 - 4.0 / std::f64::consts::PI * sum).clamp(0.0, 1.0)
}

/// All six weights in chi-square form followed by their supremum versions.
pub fn all_variants(a: &SortedDataset, b: &SortedDataset) -> Result<Vec<LogRankResult>> {
    all_variants_with(a, b, WeightSpec::FH_DEFAULT)
}

pub fn all_variants_with(a: &SortedDataset, b: &SortedDataset, fh: WeightSpec) -> Result<Vec<LogRankResult>> {
    let weights = [WeightSpec::LR, WeightSpec::GW, WeightSpec::TW, WeightSpec::PP, WeightSpec::MPP, fh];
    let mut out = Vec::with_capacity(12);
    for w in weights {
        out.push(weighted_logrank(a, b, w)?);
    }
    for w in weights {
        out.push(sup_logrank(a, b, w)?);
    }
    Ok(out)
}

/// Column order of the comparator tables.
pub const VARIANT_NAMES: [&str; 12] =
    ["LR", "GW", "TW", "PP", "MPP", "FH", "SLR", "SGW", "STW", "SPP", "SMPP", "SFH"];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{sort_and_validate, SurvivalDataset, TiePolicy};

    fn data(times: &[f64], failed: &[bool]) -> SortedDataset {
        sort_and_validate(&SurvivalDataset::from_parts(times, failed).unwrap(), TiePolicy::default())
    }

    #[test]
    fn two_versus_one_by_hand() {
        let a = data(&[1.0], &[true]);
        let b = data(&[2.0], &[true]);
        let r = weighted_logrank(&a, &b, WeightSpec::LR).unwrap();
        assert!((r.score - 0.5).abs() < 1e-15);
        assert!((r.variance - 0.25).abs() < 1e-15);
        assert!((r.statistic - 1.0).abs() < 1e-15);
        assert!((r.p_value - 0.317_310_507_862_914).abs() < 1e-9);
    }

    #[test]
    fn label_swap() {
        let a = data(&[1.0, 2.5, 3.0, 4.0, 6.0], &[true, false, true, true, false]);
        let b = data(&[0.5, 2.0, 2.5, 5.0], &[true, true, true, false]);
        for w in WeightSpec::all() {
            let ab = weighted_logrank(&a, &b, w).unwrap();
            let ba = weighted_logrank(&b, &a, w).unwrap();
            assert!((ab.score + ba.score).abs() < 1e-12);
            assert!((ab.statistic - ba.statistic).abs() < 1e-12);
            let sab = sup_logrank(&a, &b, w).unwrap();
            assert!(sab.statistic + 1e-12 >= ab.statistic.sqrt());
        }
        let fh0 = weighted_logrank(&a, &b, WeightSpec::FH { p: 0.0, q: 0.0 }).unwrap();
        let lr = weighted_logrank(&a, &b, WeightSpec::LR).unwrap();
        assert!((fh0.statistic - lr.statistic).abs() < 1e-12);
    }

    #[test]
    fn no_events() {
        let a = data(&[1.0], &[false]);
        assert_eq!(weighted_logrank(&a, &a, WeightSpec::LR), Err(Error::NoEvents));
        assert_eq!(sup_logrank(&a, &a, WeightSpec::LR), Err(Error::NoEvents));
    }

    #[test]
    fn brownian_tail_limits() {
        assert!(brownian_sup_tail(10.0) < 1e-12);
        assert!((brownian_sup_tail(1e-3) - 1.0).abs() < 1e-12);
        assert!((brownian_sup_tail(1.96) - 0.0999).abs() < 5e-4);
    }

    #[test]
    fn twelve_variants() {
        let a = data(&[1.0, 2.0, 3.0], &[true, true, false]);
        let b = data(&[1.5, 2.5, 3.5], &[true, false, true]);
        let names: Vec<String> = all_variants(&a, &b).unwrap().into_iter().map(|r| r.test).collect();
        assert_eq!(names, VARIANT_NAMES);
    }
}
