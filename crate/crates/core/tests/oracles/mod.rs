//! Independent reference computations shared by the integration tests and
//! the acceptance harness.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use fiducial_survival::dataset::{sort_and_validate, SortedDataset, SurvivalDataset, TiePolicy};
use fiducial_survival::estimate::kaplan_meier;
use fiducial_survival::gfd::{beta_product_values, expected_lower, expected_upper, Sampler};
use fiducial_survival::rng::RngStream;

pub fn sorted(times: &[f64], failed: &[bool]) -> SortedDataset {
    sort_and_validate(&SurvivalDataset::from_parts(times, failed).unwrap(), TiePolicy::default())
}

/// All permutations of `0..n`, as `perm[i]` = rank given to observation `i`.
pub fn permutations(n: usize) -> Vec<Vec<u32>> {
    fn rec(prefix: &mut Vec<u32>, used: &mut [bool], out: &mut Vec<Vec<u32>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for r in 0..used.len() {
            if !used[r] {
                used[r] = true;
                prefix.push(r as u32);
                rec(prefix, used, out);
                prefix.pop();
                used[r] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Whether some distribution function `F` satisfies, with `u_i` = rank of
/// observation `i` among distinct uniforms and observations at distinct
/// increasing times,
///   failure:  F(y_i-) < u_i <= F(y_i)
///   censored: F(y_j) < u_j.
/// The pointwise smallest candidate is `F(y) = max{u_k : failure k, y_k <= y}`;
/// any feasible `F` dominates it, so it is feasible iff the set is nonempty.
pub fn constraint_set_nonempty(failed: &[bool], ranks: &[u32]) -> bool {
    let mut f_before = -1i64; // F(y_i-) of the minimal candidate (below every rank)
    for (i, &fail) in failed.iter().enumerate() {
        let u = ranks[i] as i64;
        if fail {
            if f_before >= u {
                return false;
            }
            f_before = u;
        } else if f_before >= u {
            return false;
        }
    }
    true
}

pub fn brute_force_set(failed: &[bool]) -> BTreeSet<Vec<u32>> {
    permutations(failed.len()).into_iter().filter(|p| constraint_set_nonempty(failed, p)).collect()
}

pub struct PatternCheck {
    pub failed: Vec<bool>,
    pub admissible: usize,
    pub reachable_matches: bool,
    pub chi2_p: f64,
}

/// Samples `draws` permutations and compares with the brute-force set.
pub fn check_pattern(failed: &[bool], draws: usize, stream: RngStream) -> PatternCheck {
    let n = failed.len();
    let times: Vec<f64> = (1..=n).map(|i| i as f64).collect();
    let data = sorted(&times, failed);
    let admissible = brute_force_set(failed);
    let mut counts: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
    let mut sampler = Sampler::new(&data);
    let mut rng = stream.rng();
    for _ in 0..draws {
        *counts.entry(sampler.sample(&mut rng).ranks.clone()).or_default() += 1;
    }
    let reached: BTreeSet<Vec<u32>> = counts.keys().cloned().collect();
    let k = admissible.len();
    let expected = draws as f64 / k as f64;
    let stat: f64 = admissible
        .iter()
        .map(|p| {
            let o = *counts.get(p).unwrap_or(&0) as f64;
            (o - expected).powi(2) / expected
        })
        .sum();
    let chi2_p = if k > 1 { ChiSquared::new((k - 1) as f64).unwrap().sf(stat) } else { 1.0 };
    PatternCheck { failed: failed.to_vec(), admissible: k, reachable_matches: reached == admissible, chi2_p }
}

/// Every censoring pattern for `n = 1..=max_n`.
pub fn all_patterns(max_n: usize) -> Vec<Vec<bool>> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        for mask in 0u32..(1 << n) {
            out.push((0..n).map(|i| mask >> i & 1 == 1).collect());
        }
    }
    out
}

/// Untied dataset with exponential failure and censoring times.
pub fn random_dataset<R: Rng>(rng: &mut R, n: usize, censor_mean: f64) -> SortedDataset {
    let mut times = Vec::with_capacity(n);
    let mut failed = Vec::with_capacity(n);
    for _ in 0..n {
        let x = -(1.0 - rng.random::<f64>()).ln();
        let z = -censor_mean * (1.0 - rng.random::<f64>()).ln();
        times.push(x.min(z));
        failed.push(x <= z);
    }
    if !failed.iter().any(|f| *f) {
        failed[0] = true;
    }
    sorted(&times, &failed)
}

/// Two-sample Kolmogorov-Smirnov distance.
pub fn ks_distance(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Largest KS distance over failure times between the sampler's upper
/// envelope and beta-product draws.
pub fn beta_product_ks(data: &SortedDataset, draws: usize, seed: u64) -> f64 {
    let events = data.event_times();
    let mut perm: Vec<Vec<f64>> = vec![Vec::with_capacity(draws); events.len()];
    let mut beta: Vec<Vec<f64>> = vec![Vec::with_capacity(draws); events.len()];
    let mut sampler = Sampler::new(data);
    let mut rng = RngStream::new(seed, 0).rng();
    for _ in 0..draws {
        let d = sampler.sample(&mut rng);
        for (col, &t) in perm.iter_mut().zip(events) {
            col.push(d.upper_survival_at(data, t));
        }
    }
    let mut rng = RngStream::new(seed, 1).rng();
    let mut buf = Vec::new();
    for _ in 0..draws {
        beta_product_values(data, &mut rng, &mut buf);
        for (col, &v) in beta.iter_mut().zip(&buf) {
            col.push(v);
        }
    }
    perm.iter_mut().zip(beta.iter_mut()).map(|(a, b)| ks_distance(a, b)).fold(0.0, f64::max)
}

/// Largest `|mean - expected| / se` over failure times, for the upper and the
/// lower envelope.
pub fn expectation_z(data: &SortedDataset, draws: usize, seed: u64) -> (f64, f64) {
    let events = data.event_times();
    let k = events.len();
    let (mut su, mut su2, mut sl, mut sl2) = (vec![0.0; k], vec![0.0; k], vec![0.0; k], vec![0.0; k]);
    let mut sampler = Sampler::new(data);
    let mut rng = RngStream::new(seed, 0).rng();
    for _ in 0..draws {
        let d = sampler.sample(&mut rng);
        for (i, &t) in events.iter().enumerate() {
            let u = d.upper_survival_at(data, t);
            let l = d.lower_survival_at(data, t);
            su[i] += u;
            su2[i] += u * u;
            sl[i] += l;
            sl2[i] += l * l;
        }
    }
    let m = draws as f64;
    let z = |s: &[f64], s2: &[f64], exact: &[f64]| {
        (0..k)
            .map(|i| {
                let mean = s[i] / m;
                let var = (s2[i] / m - mean * mean).max(0.0) * m / (m - 1.0);
                let se = (var / m).sqrt();
                let diff = (mean - exact[i]).abs();
                if se > 0.0 { diff / se } else if diff < 1e-12 { 0.0 } else { f64::INFINITY }
            })
            .fold(0.0, f64::max)
    };
    (z(&su, &su2, &expected_upper(data)), z(&sl, &sl2, &expected_lower(data)))
}

/// Exact closed forms at each failure time, from the raw observations:
/// `(E[S^L], KM, E[S^U])`.
pub fn rational_sandwich(times: &[f64], failed: &[bool]) -> Vec<(BigRational, BigRational, BigRational)> {
    let mut fail_times: Vec<f64> = times.iter().zip(failed).filter(|(_, f)| **f).map(|(t, _)| *t).collect();
    fail_times.sort_by(f64::total_cmp);
    fail_times.dedup();
    let int = |v: usize| BigRational::from_integer(BigInt::from(v));
    let mut km = BigRational::one();
    let mut up = BigRational::one();
    let mut out = Vec::new();
    for &s in &fail_times {
        let k = times.iter().filter(|&&y| y >= s).count();
        let d = times.iter().zip(failed).filter(|(y, f)| **f && **y == s).count();
        km *= (int(k) - int(d)) / int(k);
        up *= (int(k) + int(1) - int(d)) / (int(k) + int(1));
        let lo = up.clone() * ((int(k) - int(1)) / int(k));
        out.push((lo, km.clone(), up.clone()));
    }
    out
}

pub fn to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap()
}

/// Checks the sandwich exactly and the library's float products against it.
pub fn lemma_sandwich(times: &[f64], failed: &[bool]) -> Result<(), String> {
    let data = sorted(times, failed);
    let exact = rational_sandwich(times, failed);
    let km = kaplan_meier(&data);
    let (eu, el) = (expected_upper(&data), expected_lower(&data));
    for (i, (lo, mid, hi)) in exact.iter().enumerate() {
        if !(lo <= mid && mid <= hi) {
            return Err(format!("ordering fails at failure {i}"));
        }
        if lo < &BigRational::zero() {
            return Err("negative expectation".into());
        }
        let t = data.event_times()[i];
        for (name, lib, r) in [("upper", eu[i], hi), ("km", km.eval(t), mid), ("lower", el[i], lo)] {
            if (lib - to_f64(r)).abs() > 1e-12 {
                return Err(format!("{name} product differs at failure {i}: {lib} vs {}", to_f64(r)));
            }
        }
    }
    Ok(())
}

/// `P(sup_{[0,1]} |W| >= x)` by the reflection-principle series
/// `1 - sum_k (-1)^k [Phi((2k+1)x) - Phi((2k-1)x)]`.
pub fn brownian_sup_tail_reference(x: f64) -> f64 {
    let phi = Normal::new(0.0, 1.0).unwrap();
    let mut inside = 0.0;
    for k in -50i64..=50 {
        let term = phi.cdf((2 * k + 1) as f64 * x) - phi.cdf((2 * k - 1) as f64 * x);
        inside += if k % 2 == 0 { term } else { -term };
    }
    1.0 - inside
}

/// Runs one CLI command into a fresh directory and returns every output file
/// except the manifest.
pub fn cli_outputs(args: &[&str], threads: usize, dir: &Path) -> (i32, BTreeMap<String, Vec<u8>>) {
    let out = dir.join(format!("{}-t{threads}", args[0]));
    let threads = threads.to_string();
    let mut argv = vec!["fidsurv"];
    argv.extend_from_slice(args);
    argv.extend(["--threads", &threads, "--out", out.to_str().unwrap()]);
    let code = fiducial_survival::cli::dispatch(argv);
    let mut files = BTreeMap::new();
    if let Ok(entries) = std::fs::read_dir(&out) {
        for e in entries {
            let p = e.unwrap().path();
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            if name != fiducial_survival::cli::MANIFEST_FILE {
                files.insert(name, std::fs::read(&p).unwrap());
            }
        }
    }
    (code, files)
}

/// Writes a one-sample and a grouped two-sample CSV for CLI runs.
pub fn write_cli_inputs(dir: &Path) -> (String, String) {
    use fiducial_survival::simlab::{sample_scenario, table1, table7};
    let write = |name: &str, data: &SurvivalDataset| {
        let mut s = String::from("time,status,group\n");
        for r in data.records() {
            s.push_str(&format!(
                "{},{},{}\n",
                r.time,
                r.status.is_failure() as u8,
                r.group.as_deref().unwrap_or("")
            ));
        }
        let p = dir.join(name);
        std::fs::write(&p, s).unwrap();
        p.to_str().unwrap().to_string()
    };
    let one = sample_scenario(&table1(), &mut RngStream::new(99, 0).rng()).unwrap();
    let mut two = sample_scenario(&table7(), &mut RngStream::new(98, 0).rng()).unwrap();
    let records: Vec<_> = two.records().iter().step_by(4).cloned().collect();
    two = SurvivalDataset::new(records).unwrap();
    (write("one.csv", &one), write("two.csv", &two))
}

/// The command set exercised by the determinism checks.
pub fn cli_commands(one: &str, two: &str, config: &str) -> Vec<Vec<String>> {
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    vec![
        s(&["fit", one, "--m", "400", "--seed", "7"]),
        s(&["ci", one, "--m", "400", "--seed", "7", "--times", "1,2,3,4"]),
        s(&["ci", one, "--m", "400", "--seed", "7", "--flavor", "conservative"]),
        s(&["quantile-ci", one, "--m", "400", "--seed", "7", "--q", "0.9,0.8"]),
        s(&["band", one, "--m", "400", "--seed", "7"]),
        s(&["test", one, "--m", "400", "--seed", "7", "--null", "{ family = \"exponential\", mean = 10.0 }"]),
        s(&["test2", two, "--m", "400", "--seed", "7"]),
        s(&["logrank", two]),
        s(&["simulate", config, "--reps", "40", "--m", "200"]),
        s(&["plotdata", one, "--m", "200", "--seed", "7", "--draws", "10"]),
    ]
}
