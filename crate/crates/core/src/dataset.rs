//! Right-censored survival data: ingestion, ordering and risk-set bookkeeping.
//!
//! Input is delimiter-separated text with columns `time,status[,group]`,
//! where `status` is `1` for an observed failure and `0` for a censored
//! observation. A header row is optional.

use std::collections::BTreeMap;
use std::io::BufRead;

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Censored,
    Failure,
}

impl Status {
    pub fn is_failure(self) -> bool {
        matches!(self, Status::Failure)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub time: f64,
    pub status: Status,
    pub group: Option<String>,
}

impl Record {
    pub fn failure(time: f64) -> Self {
        Record { time, status: Status::Failure, group: None }
    }

    pub fn censored(time: f64) -> Self {
        Record { time, status: Status::Censored, group: None }
    }
}

/// Unordered, validated sample of `(time, status[, group])` records.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalDataset {
    records: Vec<Record>,
}

impl SurvivalDataset {
    pub fn new(records: Vec<Record>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyInput);
        }
        for (i, r) in records.iter().enumerate() {
            if !r.time.is_finite() || r.time < 0.0 {
                return Err(Error::MalformedRow {
                    line: i + 1,
                    reason: format!("time must be finite and nonnegative, got {}", r.time),
                });
            }
        }
        Ok(SurvivalDataset { records })
    }

    /// Builds a dataset from parallel slices; `failed[i]` is the event indicator.
    pub fn from_parts(times: &[f64], failed: &[bool]) -> Result<Self> {
        if times.len() != failed.len() {
            return Err(Error::InvalidArgument(format!(
                "{} times but {} status values",
                times.len(),
                failed.len()
            )));
        }
        let records = times
            .iter()
            .zip(failed)
            .map(|(&time, &f)| if f { Record::failure(time) } else { Record::censored(time) })
            .collect();
        Self::new(records)
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Splits by group label; records without a label go under `""`.
    pub fn split_by_group(&self) -> BTreeMap<String, SurvivalDataset> {
        let mut out: BTreeMap<String, Vec<Record>> = BTreeMap::new();
        for r in &self.records {
            out.entry(r.group.clone().unwrap_or_default()).or_default().push(r.clone());
        }
        out.into_iter().map(|(k, records)| (k, SurvivalDataset { records })).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HeaderMode {
    /// Treat the first row as a header when its first field is not numeric.
    #[default]
    Auto,
    Present,
    Absent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FormatOptions {
    pub delimiter: u8,
    pub header: HeaderMode,
}

impl Default for FormatOptions {
    fn default() -> Self {
        FormatOptions { delimiter: b',', header: HeaderMode::Auto }
    }
}

#[derive(Debug, Clone, Copy)]
enum Column {
    Time,
    Status,
    Group,
}

fn parse_header(fields: &[&str]) -> Result<Vec<Column>> {
    let cols = fields
        .iter()
        .map(|f| match f.trim().to_ascii_lowercase().as_str() {
            "time" => Ok(Column::Time),
            "status" => Ok(Column::Status),
            "group" => Ok(Column::Group),
            other => Err(Error::UnknownColumn(other.to_string())),
        })
        .collect::<Result<Vec<_>>>()?;
    let has = |c: fn(&Column) -> bool| cols.iter().filter(|x| c(x)).count();
    if has(|c| matches!(c, Column::Time)) != 1 || has(|c| matches!(c, Column::Status)) != 1 {
        return Err(Error::InvalidArgument(
            "header must name exactly one `time` and one `status` column".into(),
        ));
    }
    Ok(cols)
}

/// Parses `time,status[,group]` rows. Blank lines and lines starting with `#`
/// are skipped; line numbers in errors count physical lines from 1.
pub fn parse_dataset<R: BufRead>(reader: R, options: &FormatOptions) -> Result<SurvivalDataset> {
    let delim = options.delimiter as char;
    let mut columns: Option<Vec<Column>> = None;
    let mut first = true;
    let mut records = Vec::new();

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(delim).map(str::trim).collect();
        if first {
            first = false;
            let is_header = match options.header {
                HeaderMode::Present => true,
                HeaderMode::Absent => false,
                HeaderMode::Auto => fields[0].parse::<f64>().is_err(),
            };
            if is_header {
                columns = Some(parse_header(&fields)?);
                continue;
            }
        }
        let cols = columns.get_or_insert_with(|| match fields.len() {
            2 => vec![Column::Time, Column::Status],
            _ => vec![Column::Time, Column::Status, Column::Group],
        });
        if fields.len() != cols.len() {
            return Err(Error::MalformedRow {
                line: line_no,
                reason: format!("expected {} fields, found {}", cols.len(), fields.len()),
            });
        }
        let mut time = None;
        let mut status = None;
        let mut group = None;
        for (col, raw) in cols.iter().zip(&fields) {
            match col {
                Column::Time => {
                    let t: f64 = raw.parse().map_err(|_| Error::MalformedRow {
                        line: line_no,
                        reason: format!("time `{raw}` is not a number"),
                    })?;
                    if !t.is_finite() || t < 0.0 {
                        return Err(Error::MalformedRow {
                            line: line_no,
                            reason: format!("time must be finite and nonnegative, got {raw}"),
                        });
                    }
                    time = Some(t);
                }
                Column::Status => {
                    status = Some(match *raw {
                        "1" => Status::Failure,
                        "0" => Status::Censored,
                        _ => {
                            return Err(Error::MalformedRow {
                                line: line_no,
                                reason: format!("status must be 0 or 1, got `{raw}`"),
                            })
                        }
                    });
                }
                Column::Group => group = Some(raw.to_string()),
            }
        }
        records.push(Record { time: time.unwrap(), status: status.unwrap(), group });
    }
    SurvivalDataset::new(records)
}

/// How tied observation times are resolved before sampling.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum TiePolicy {
    /// Failures precede censored records at a shared time.
    #[default]
    FailuresFirst,
    /// Break ties by adding `U(0, scale * min_gap)` noise to tied records, with
    /// the noise stream seeded from the dataset fingerprint.
    Jitter { scale: f64 },
}

/// Time-ordered sample together with counting-process summaries at the
/// distinct failure times. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedDataset {
    times: Vec<f64>,
    failed: Vec<bool>,
    event_times: Vec<f64>,
    risk_counts: Vec<usize>,
    event_counts: Vec<usize>,
    cum_failures: Vec<usize>,
    tie_policy_applied: bool,
    fingerprint: String,
}

fn fingerprint_of(times: &[f64], failed: &[bool]) -> String {
    let mut h = Sha256::new();
    for (t, f) in times.iter().zip(failed) {
        h.update(t.to_bits().to_le_bytes());
        h.update([*f as u8]);
    }
    hex::encode(&h.finalize()[..16])
}

fn has_ties(sorted_times: &[f64]) -> bool {
    sorted_times.windows(2).any(|w| w[0] == w[1])
}

fn order_records(pairs: &mut [(f64, bool)]) {
    // Failures first within a tied time.
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)));
}

pub fn sort_and_validate(dataset: &SurvivalDataset, policy: TiePolicy) -> SortedDataset {
    let mut pairs: Vec<(f64, bool)> =
        dataset.records().iter().map(|r| (r.time, r.status.is_failure())).collect();
    order_records(&mut pairs);
    let sorted_times: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let tied = has_ties(&sorted_times);

    if let (TiePolicy::Jitter { scale }, true) = (policy, tied) {
        let base = fingerprint_of(&sorted_times, &pairs.iter().map(|p| p.1).collect::<Vec<_>>());
        let seed = u64::from_str_radix(&base[..16], 16).unwrap_or(0);
        let mut rng = RngStream::new(seed, 0).rng();
        let min_gap = sorted_times
            .windows(2)
            .map(|w| w[1] - w[0])
            .filter(|g| *g > 0.0)
            .fold(f64::INFINITY, f64::min);
        let gap = if min_gap.is_finite() { min_gap } else { 1.0 };
        let mut i = 0;
        while i < pairs.len() {
            let mut j = i + 1;
            while j < pairs.len() && pairs[j].0 == pairs[i].0 {
                j += 1;
            }
            if j - i > 1 {
                for p in &mut pairs[i..j] {
                    p.0 += rng.random::<f64>() * scale * gap;
                }
            }
            i = j;
        }
        order_records(&mut pairs);
    }

    let times: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let failed: Vec<bool> = pairs.iter().map(|p| p.1).collect();
    SortedDataset::from_sorted(times, failed, tied)
}

impl SortedDataset {
    fn from_sorted(times: Vec<f64>, failed: Vec<bool>, tie_policy_applied: bool) -> Self {
        let n = times.len();
        let mut event_times = Vec::new();
        let mut risk_counts = Vec::new();
        let mut event_counts = Vec::new();
        let mut cum_failures = Vec::with_capacity(n + 1);
        cum_failures.push(0);
        let mut i = 0;
        while i < n {
            let t = times[i];
            let mut j = i;
            let mut d = 0;
            while j < n && times[j] == t {
                d += failed[j] as usize;
                j += 1;
            }
            if d > 0 {
                event_times.push(t);
                risk_counts.push(n - i);
                event_counts.push(d);
            }
            i = j;
        }
        for f in &failed {
            cum_failures.push(cum_failures.last().unwrap() + *f as usize);
        }
        let fingerprint = fingerprint_of(&times, &failed);
        SortedDataset {
            times,
            failed,
            event_times,
            risk_counts,
            event_counts,
            cum_failures,
            tie_policy_applied,
            fingerprint,
        }
    }

    pub fn n(&self) -> usize {
        self.times.len()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Event indicators parallel to [`times`](Self::times).
    pub fn failed(&self) -> &[bool] {
        &self.failed
    }

    /// Distinct failure times `s_1 < s_2 < ...`.
    pub fn event_times(&self) -> &[f64] {
        &self.event_times
    }

    /// Number at risk at each event time.
    pub fn risk_counts(&self) -> &[usize] {
        &self.risk_counts
    }

    /// Number of failures at each event time.
    pub fn event_counts(&self) -> &[usize] {
        &self.event_counts
    }

    pub fn failure_count(&self) -> usize {
        *self.cum_failures.last().unwrap()
    }

    /// True when the input had tied times, so the tie policy shaped the order.
    pub fn tie_policy_applied(&self) -> bool {
        self.tie_policy_applied
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn max_time(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn max_failure_time(&self) -> Option<f64> {
        self.event_times.last().copied()
    }

    /// Distinct observation times, ascending.
    pub fn distinct_times(&self) -> Vec<f64> {
        let mut out = self.times.clone();
        out.dedup();
        out
    }

    /// `(K(t), N(t))`: the number with `y >= t` and the number of failures with `y <= t`.
    pub fn risk_and_event_counts(&self, t: f64) -> (usize, usize) {
        let below = self.times.partition_point(|&y| y < t);
        let upto = self.times.partition_point(|&y| y <= t);
        (self.n() - below, self.cum_failures[upto])
    }

    pub fn to_dataset(&self) -> SurvivalDataset {
        let records = self
            .times
            .iter()
            .zip(&self.failed)
            .map(|(&t, &f)| if f { Record::failure(t) } else { Record::censored(t) })
            .collect();
        SurvivalDataset { records }
    }
}
