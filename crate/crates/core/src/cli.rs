//! Command-line front end. `dispatch` parses an argument vector, runs one
//! subcommand, writes its CSV/JSON artifacts plus `manifest.json` into the
//! output directory and returns the process exit code: 0 on success, 2 on a
//! usage error, 1 on a data error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, CommandFactory, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::curve::{ConstantCurve, Curve, StepCurve};
use crate::dataset::{sort_and_validate, FormatOptions, SortedDataset, TiePolicy};
use crate::error::Error;
use crate::estimate::{
    fiducial_point_estimate, greenwood, greenwood_ci, kaplan_meier, kaplan_meier_with_tail, TailConvention,
};
use crate::gfd::{sample_ensemble, FiducialEnsemble};
use crate::infer::{
    curvewise_band, one_sample_test, pointwise_ci, quantile_ci, two_sample_test, Flavor, Sidedness,
};
use crate::io::{
    band_csv, ensemble_csv, file_sha256, read_dataset, step_curve_csv, table_csv, Component, CurveEnvelope,
    EnsembleMetadata,
};
use crate::logrank::{all_variants_with, WeightSpec};
use crate::rng::derive_seed;
use crate::simlab::{Distribution, ExperimentConfig, SurvivalCurve};

pub const MANIFEST_FILE: &str = "manifest.json";

const DEFAULT_M: usize = 1000;
const DEFAULT_SEED: u64 = 1;
const DEFAULT_LEVEL: f64 = 0.95;
const DEFAULT_ALPHA: f64 = 0.05;
const DEFAULT_OUT: &str = "fidsurv-out";
/// Seed tag for the second sample's ensemble in two-sample commands.
const TAG_SECOND_SAMPLE: u64 = 0xB;

#[derive(Debug, Parser)]
#[command(name = "fidsurv", version, about = "Fiducial inference for right-censored survival data")]
#[command(args_override_self = true)]
struct Cli {
    #[command(flatten)]
    globals: Globals,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Default, Args)]
struct Globals {
    /// Number of fiducial draws [default: 1000]
    #[arg(long, global = true, env = "FIDSURV_M")]
    m: Option<usize>,
    /// Master seed [default: 1]
    #[arg(long, global = true, env = "FIDSURV_SEED")]
    seed: Option<u64>,
    /// Confidence level [default: 0.95]
    #[arg(long, global = true, env = "FIDSURV_LEVEL")]
    level: Option<f64>,
    /// Significance level used in summaries [default: 0.05]
    #[arg(long, global = true, env = "FIDSURV_ALPHA")]
    alpha: Option<f64>,
    /// Right end of the evaluation window [default: largest failure time]
    #[arg(long, global = true, env = "FIDSURV_WINDOW")]
    window: Option<f64>,
    /// Pointwise interval flavor: interp or conservative [default: interp]
    #[arg(long, global = true, env = "FIDSURV_FLAVOR")]
    flavor: Option<Flavor>,
    /// Kaplan-Meier tail past the last observation: kml, kmm or kmh [default: kmm]
    #[arg(long, global = true, env = "FIDSURV_TAIL")]
    tail: Option<TailConvention>,
    /// Worker threads; results do not depend on it
    #[arg(long, global = true, env = "FIDSURV_THREADS")]
    threads: Option<usize>,
    /// Output directory [default: fidsurv-out]
    #[arg(long, global = true, env = "FIDSURV_OUT")]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fiducial point estimate and Kaplan-Meier with Greenwood variance
    Fit { data: PathBuf },
    /// Pointwise confidence intervals for S(t)
    Ci {
        data: PathBuf,
        /// Comma-separated times [default: the failure times inside the window]
        #[arg(long, value_delimiter = ',')]
        times: Vec<f64>,
    },
    /// Confidence intervals for the time at which S falls to q
    QuantileCi {
        data: PathBuf,
        /// Comma-separated survival levels
        #[arg(long, value_delimiter = ',', default_value = "0.5")]
        q: Vec<f64>,
    },
    /// Curvewise confidence band
    Band { data: PathBuf },
    /// One-sample test of S = S0
    Test {
        data: PathBuf,
        /// Null distribution as an inline TOML table, e.g. `{ family = "exponential", mean = 10 }`
        #[arg(long, conflicts_with = "null_curve", required_unless_present = "null_curve")]
        null: Option<String>,
        /// Null survival curve as a `t,value` step CSV
        #[arg(long)]
        null_curve: Option<PathBuf>,
        #[arg(long, default_value = "two")]
        sided: Sidedness,
    },
    /// Two-sample test of S_A = S_B; with one file, its `group` column must name two groups
    Test2 { a: PathBuf, b: Option<PathBuf> },
    /// Weighted and supremum log-rank tests
    Logrank {
        a: PathBuf,
        b: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        fh_p: f64,
        #[arg(long, default_value_t = 1.0)]
        fh_q: f64,
    },
    /// Run a simulation experiment from a TOML or JSON config
    Simulate {
        config: PathBuf,
        /// Override the config's replication count
        #[arg(long)]
        reps: Option<usize>,
    },
    /// Export curve, ensemble and band data for plotting
    Plotdata {
        data: PathBuf,
        /// Number of draws exported per component
        #[arg(long, default_value_t = 100)]
        draws: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Fit { .. } => "fit",
            Command::Ci { .. } => "ci",
            Command::QuantileCi { .. } => "quantile-ci",
            Command::Band { .. } => "band",
            Command::Test { .. } => "test",
            Command::Test2 { .. } => "test2",
            Command::Logrank { .. } => "logrank",
            Command::Simulate { .. } => "simulate",
            Command::Plotdata { .. } => "plotdata",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputFingerprint {
    pub path: String,
    pub sha256: String,
    /// Fingerprint of the sorted dataset, when the input is survival data.
    pub dataset: Option<String>,
}

/// Provenance record written next to every run's artifacts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub arguments: Vec<String>,
    /// `arguments` with every effective setting spelled out; passing it to
    /// `dispatch` regenerates the outputs.
    pub replay: Vec<String>,
    pub seed: Option<u64>,
    pub versions: BTreeMap<String, String>,
    pub inputs: Vec<InputFingerprint>,
    pub outputs: Vec<String>,
    pub threads: Option<usize>,
    pub wall_time_secs: f64,
}

impl RunManifest {
    pub fn read(path: &Path) -> crate::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }
}

enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// Effective settings after defaults.
struct Settings {
    m: usize,
    seed: u64,
    level: f64,
    alpha: f64,
    window: Option<f64>,
    flavor: Flavor,
    tail: TailConvention,
}

fn flavor_name(f: Flavor) -> &'static str {
    match f {
        Flavor::Interp => "interp",
        Flavor::Conservative => "conservative",
    }
}

fn tail_name(t: TailConvention) -> &'static str {
    match t {
        TailConvention::Kml => "kml",
        TailConvention::Kmm => "kmm",
        TailConvention::Kmh => "kmh",
    }
}

fn sided_name(s: Sidedness) -> &'static str {
    match s {
        Sidedness::Two => "two",
        Sidedness::Upper => "upper",
        Sidedness::Lower => "lower",
    }
}

impl Settings {
    fn resolve(g: &Globals) -> Outcome<Self> {
        let s = Settings {
            m: g.m.unwrap_or(DEFAULT_M),
            seed: g.seed.unwrap_or(DEFAULT_SEED),
            level: g.level.unwrap_or(DEFAULT_LEVEL),
            alpha: g.alpha.unwrap_or(DEFAULT_ALPHA),
            window: g.window,
            flavor: g.flavor.unwrap_or_default(),
            tail: g.tail.unwrap_or_default(),
        };
        if s.m == 0 {
            return Err(Failure::Usage("--m must be at least 1".into()));
        }
        if !(s.level > 0.0 && s.level < 1.0) {
            return Err(Failure::Usage(format!("--level must lie in (0, 1), got {}", s.level)));
        }
        if !(s.alpha > 0.0 && s.alpha < 1.0) {
            return Err(Failure::Usage(format!("--alpha must lie in (0, 1), got {}", s.alpha)));
        }
        if s.window.is_some_and(|w| !(w.is_finite() && w > 0.0)) {
            return Err(Failure::Usage("--window must be positive".into()));
        }
        Ok(s)
    }

    fn flags(&self) -> Vec<String> {
        let mut v = vec![
            "--m".into(),
            self.m.to_string(),
            "--seed".into(),
            self.seed.to_string(),
            "--level".into(),
            self.level.to_string(),
            "--alpha".into(),
            self.alpha.to_string(),
            "--flavor".into(),
            flavor_name(self.flavor).into(),
            "--tail".into(),
            tail_name(self.tail).into(),
        ];
        if let Some(w) = self.window {
            v.extend(["--window".into(), w.to_string()]);
        }
        v
    }
}

/// Explicitly supplied overrides only; `simulate` takes the rest from its config.
fn override_flags(g: &Globals) -> Vec<String> {
    let mut v = Vec::new();
    if let Some(m) = g.m {
        v.extend(["--m".into(), m.to_string()]);
    }
    if let Some(s) = g.seed {
        v.extend(["--seed".into(), s.to_string()]);
    }
    if let Some(l) = g.level {
        v.extend(["--level".into(), l.to_string()]);
    }
    if let Some(a) = g.alpha {
        v.extend(["--alpha".into(), a.to_string()]);
    }
    v
}

struct Run {
    out: PathBuf,
    outputs: Vec<String>,
    inputs: Vec<InputFingerprint>,
    summary: String,
}

impl Run {
    fn file(&mut self, name: &str, body: &str) -> Outcome<()> {
        std::fs::write(self.out.join(name), body).map_err(Error::from)?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    fn csv(&mut self, name: &str, body: &str) -> Outcome<()> {
        self.file(name, &format!("# manifest: {MANIFEST_FILE}\n{body}"))
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Outcome<()> {
        let mut v = serde_json::to_value(value).map_err(|e| Error::Io(e.to_string()))?;
        let v = match v.as_object_mut() {
            Some(obj) => {
                obj.insert("manifest".into(), MANIFEST_FILE.into());
                v
            }
            None => serde_json::json!({ "manifest": MANIFEST_FILE, "value": v }),
        };
        let text = serde_json::to_string_pretty(&v).map_err(|e| Error::Io(e.to_string()))?;
        self.file(name, &(text + "\n"))
    }

    fn fingerprint(&mut self, path: &Path, dataset: Option<String>) -> Outcome<()> {
        self.inputs.push(InputFingerprint { path: path.display().to_string(), sha256: file_sha256(path)?, dataset });
        Ok(())
    }

    fn dataset(&mut self, path: &Path) -> Outcome<SortedDataset> {
        let raw = read_dataset(path, &FormatOptions::default())?;
        let data = sort_and_validate(&raw, TiePolicy::default());
        self.fingerprint(path, Some(data.fingerprint().to_string()))?;
        Ok(data)
    }

    /// Two samples from two files, or from the two groups of one file.
    fn pair(&mut self, a: &Path, b: Option<&Path>) -> Outcome<(SortedDataset, SortedDataset, [String; 2])> {
        if let Some(b) = b {
            let da = self.dataset(a)?;
            let db = self.dataset(b)?;
            return Ok((da, db, [a.display().to_string(), b.display().to_string()]));
        }
        let raw = read_dataset(a, &FormatOptions::default())?;
        let groups = raw.split_by_group();
        if groups.len() != 2 {
            return Err(Error::InvalidArgument(format!(
                "expected two groups in the `group` column, found {}",
                groups.len()
            ))
            .into());
        }
        let mut it = groups.into_iter();
        let (na, ga) = it.next().unwrap();
        let (nb, gb) = it.next().unwrap();
        let da = sort_and_validate(&ga, TiePolicy::default());
        let db = sort_and_validate(&gb, TiePolicy::default());
        self.fingerprint(a, None)?;
        Ok((da, db, [na, nb]))
    }

    fn say(&mut self, line: impl AsRef<str>) {
        self.summary.push_str(line.as_ref());
        self.summary.push('\n');
    }
}

fn ensemble(data: &SortedDataset, s: &Settings) -> Outcome<FiducialEnsemble> {
    Ok(sample_ensemble(data, s.m, s.seed)?)
}

fn describe(run: &mut Run, data: &SortedDataset) {
    run.say(format!("n = {}, failures = {}, censored = {}", data.n(), data.failure_count(), data.n() - data.failure_count()));
}

fn cmd_fit(run: &mut Run, s: &Settings, data: &Path) -> Outcome<()> {
    let d = run.dataset(data)?;
    describe(run, &d);
    let ens = ensemble(&d, s)?;
    let window = ens.window(s.window)?;
    let est = fiducial_point_estimate(&ens, &window);
    let grid = window.refined(ens.knots().iter().copied()).grid().to_vec();
    let matrix = ens.interp_matrix(&grid);
    let m = ens.m();
    let rows: Vec<[f64; 3]> = grid
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let col = (0..m).map(|j| matrix[j * grid.len() + k]);
            let mean = col.clone().sum::<f64>() / m as f64;
            let var = if m > 1 { col.map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1) as f64 } else { 0.0 };
            [t, est.eval(t), var]
        })
        .collect();
    run.csv("estimate.csv", &table_csv(&["t", "estimate", "variance"], &rows))?;

    let gw = greenwood(&d);
    let km = kaplan_meier_with_tail(&d, s.tail);
    let km_rows: Vec<[f64; 3]> = km.points().map(|(t, v)| [t, v, gw.variance_at(t)]).collect();
    run.csv("km.csv", &table_csv(&["t", "estimate", "variance"], &km_rows))?;
    run.json("estimate.json", &CurveEnvelope::step(&est, Some(s.seed), Some(window.tau())))?;

    run.say(format!("tau = {}, m = {}, seed = {}", window.tau(), s.m, s.seed));
    run.say(format!("{:>12} {:>10} {:>10}", "t", "fiducial", "km"));
    let step = (d.event_times().len() / 10).max(1);
    for &t in d.event_times().iter().step_by(step) {
        run.say(format!("{t:>12.4} {:>10.4} {:>10.4}", est.eval(t), km.eval(t)));
    }
    Ok(())
}

fn cmd_ci(run: &mut Run, s: &Settings, data: &Path, times: &[f64]) -> Outcome<()> {
    let d = run.dataset(data)?;
    describe(run, &d);
    let ens = ensemble(&d, s)?;
    let window = ens.window(s.window)?;
    let times: Vec<f64> = if times.is_empty() {
        d.event_times().iter().copied().filter(|&t| t <= window.tau()).collect()
    } else {
        times.to_vec()
    };
    let gw = greenwood(&d);
    let mut rows = Vec::with_capacity(times.len());
    let mut intervals = Vec::with_capacity(times.len());
    for &t in &times {
        let iv = pointwise_ci(&ens, t, s.level, s.flavor)?;
        let (kl, ku) = match greenwood_ci(&gw, t, s.level) {
            Ok(b) => b,
            Err(Error::DegenerateAtZero(_)) => (f64::NAN, f64::NAN),
            Err(e) => return Err(e.into()),
        };
        rows.push([t, iv.lower, iv.upper, iv.width(), gw.curve.eval(t), kl, ku]);
        intervals.push(serde_json::json!({ "t": t, "lower": iv.lower, "upper": iv.upper }));
    }
    run.csv("ci.csv", &table_csv(&["t", "lower", "upper", "width", "km", "km_lower", "km_upper"], &rows))?;
    run.json(
        "ci.json",
        &serde_json::json!({
            "flavor": flavor_name(s.flavor), "level": s.level, "m": s.m, "seed": s.seed, "intervals": intervals,
        }),
    )?;
    run.say(format!("{} {}% pointwise intervals ({})", times.len(), s.level * 100.0, flavor_name(s.flavor)));
    for r in &rows {
        run.say(format!("  t = {:<10.4} [{:.4}, {:.4}]", r[0], r[1], r[2]));
    }
    Ok(())
}

fn cmd_quantile(run: &mut Run, s: &Settings, data: &Path, qs: &[f64]) -> Outcome<()> {
    let d = run.dataset(data)?;
    describe(run, &d);
    let ens = ensemble(&d, s)?;
    let window = ens.window(s.window)?;
    let mut out = Vec::new();
    for &q in qs {
        if !(q > 0.0 && q < 1.0) {
            return Err(Failure::Usage(format!("--q values must lie in (0, 1), got {q}")));
        }
        out.push(quantile_ci(&ens, q, s.level, &window)?);
    }
    let rows: Vec<[f64; 6]> = out
        .iter()
        .map(|r| {
            [r.q, r.lower, r.upper, r.lower_open as u8 as f64, r.upper_open as u8 as f64, r.non_identifiable as f64]
        })
        .collect();
    run.csv(
        "quantile_ci.csv",
        &table_csv(&["q", "lower", "upper", "lower_open", "upper_open", "non_identifiable"], &rows),
    )?;
    run.json("quantile_ci.json", &serde_json::json!({ "level": s.level, "m": s.m, "seed": s.seed, "intervals": out }))?;
    for r in &out {
        let hi = if r.upper_open { format!(">= {:.4}", r.upper) } else { format!("{:.4}", r.upper) };
        run.say(format!("  q = {}: [{:.4}, {hi}] ({} draws never reach q)", r.q, r.lower, r.non_identifiable));
    }
    Ok(())
}

fn cmd_band(run: &mut Run, s: &Settings, data: &Path) -> Outcome<()> {
    let d = run.dataset(data)?;
    describe(run, &d);
    let ens = ensemble(&d, s)?;
    let window = ens.window(s.window)?;
    let band = curvewise_band(&ens, s.level, &window)?;
    run.csv("band.csv", &band_csv(&band))?;
    run.json("band.json", &band)?;
    run.say(format!("{}% curvewise band on [0, {}]: radius = {:.6}", s.level * 100.0, window.tau(), band.radius));
    Ok(())
}

fn read_step_curve(path: &Path) -> Outcome<StepCurve> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut knots = Vec::new();
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(|c: char| c.is_ascii_alphabetic()) {
            continue;
        }
        let bad = |reason: &str| Error::MalformedRow { line: i + 1, reason: reason.into() };
        let (t, v) = line.split_once(',').ok_or_else(|| bad("expected `t,value`"))?;
        knots.push(t.trim().parse::<f64>().map_err(|_| bad("time is not a number"))?);
        values.push(v.trim().parse::<f64>().map_err(|_| bad("value is not a number"))?);
    }
    Ok(StepCurve::new(knots, values)?)
}

fn parse_null(text: &str) -> Outcome<Distribution> {
    #[derive(Deserialize)]
    struct Wrapper {
        null: Distribution,
    }
    let w: Wrapper = toml::from_str(&format!("null = {text}"))
        .map_err(|e| Failure::Usage(format!("--null is not a distribution table: {e}")))?;
    w.null.validate()?;
    Ok(w.null)
}

fn cmd_test(
    run: &mut Run,
    s: &Settings,
    data: &Path,
    null: Option<&str>,
    null_curve: Option<&Path>,
    sided: Sidedness,
) -> Outcome<()> {
    let d = run.dataset(data)?;
    describe(run, &d);
    let dist;
    let step;
    let (s0, label): (&dyn Curve, String) = match (null, null_curve) {
        (Some(text), _) => {
            dist = parse_null(text)?;
            (&SurvivalCurve(&dist) as &dyn Curve, text.to_string())
        }
        (None, Some(path)) => {
            step = read_step_curve(path)?;
            run.fingerprint(path, None)?;
            (&step as &dyn Curve, path.display().to_string())
        }
        (None, None) => return Err(Failure::Usage("give --null or --null-curve".into())),
    };
    let ens = ensemble(&d, s)?;
    let window = ens.window(s.window)?;
    let report = one_sample_test(&ens, s0, sided, &window, &label)?;
    run.json("test.json", &report)?;
    run.say(format!("H0: S = {label} ({} sided) on [0, {}]", sided_name(sided), report.tau));
    run.say(format!("statistic = {:.6}, p = {}{}", report.statistic, report.p_value, resolution_note(report.below_resolution, s.m)));
    run.say(verdict(report.p_value, s.alpha));
    Ok(())
}

fn resolution_note(below: bool, m: usize) -> String {
    if below {
        format!(" (< 1/{m}, below resolution)")
    } else {
        String::new()
    }
}

fn verdict(p: f64, alpha: f64) -> String {
    if p < alpha {
        format!("reject at alpha = {alpha}")
    } else {
        format!("do not reject at alpha = {alpha}")
    }
}

fn cmd_test2(run: &mut Run, s: &Settings, a: &Path, b: Option<&Path>) -> Outcome<()> {
    let (da, db, names) = run.pair(a, b)?;
    let ea = ensemble(&da, s)?;
    let eb = sample_ensemble(&db, s.m, derive_seed(s.seed, TAG_SECOND_SAMPLE, 0))?;
    let window = crate::curve::EvaluationWindow::for_pair(&da, &db, s.window)?;
    let report = two_sample_test(&ea, &eb, &ConstantCurve(0.0), &window, "S_A - S_B = 0")?;
    run.json(
        "test2.json",
        &serde_json::json!({ "groups": names, "seed_b": eb.seed(), "report": report }),
    )?;
    run.say(format!("A = {} (n = {}), B = {} (n = {})", names[0], da.n(), names[1], db.n()));
    run.say(format!("statistic = {:.6}, p = {}{}", report.statistic, report.p_value, resolution_note(report.below_resolution, s.m)));
    run.say(verdict(report.p_value, s.alpha));
    Ok(())
}

fn cmd_logrank(run: &mut Run, s: &Settings, a: &Path, b: Option<&Path>, p: f64, q: f64) -> Outcome<()> {
    let (da, db, names) = run.pair(a, b)?;
    let results = all_variants_with(&da, &db, WeightSpec::FH { p, q })?;
    let mut csv = String::from("test,statistic,p_value\n");
    let mut rows = serde_json::Map::new();
    for r in &results {
        writeln!(csv, "{},{},{}", r.test, r.statistic, r.p_value).unwrap();
        rows.insert(
            r.test.clone(),
            serde_json::json!({ "statistic": r.statistic, "p_value": r.p_value, "score": r.score, "variance": r.variance }),
        );
    }
    run.csv("logrank.csv", &csv)?;
    run.json("logrank.json", &serde_json::json!({ "groups": names, "fh": { "p": p, "q": q }, "tests": rows }))?;
    run.say(format!("A = {}, B = {}", names[0], names[1]));
    for r in &results {
        let mark = if r.p_value < s.alpha { "*" } else { "" };
        run.say(format!("  {:<5} stat = {:>10.4}  p = {:.6}{mark}", r.test, r.statistic, r.p_value));
    }
    Ok(())
}

fn cmd_simulate(run: &mut Run, g: &Globals, config: &Path, reps: Option<usize>) -> Outcome<Option<u64>> {
    let mut cfg = ExperimentConfig::from_path(config)?;
    run.fingerprint(config, None)?;
    if let Some(m) = g.m {
        cfg.m = m;
    }
    if let Some(seed) = g.seed {
        cfg.seed = seed;
    }
    if let Some(l) = g.level {
        cfg.level = l;
    }
    if let Some(a) = g.alpha {
        cfg.alpha = a;
    }
    if let Some(r) = reps {
        cfg.reps = r;
    }
    if cfg.reps == 0 || cfg.m == 0 {
        return Err(Failure::Usage("reps and m must be at least 1".into()));
    }
    let name = cfg.scenario()?.name;
    let result = cfg.run()?;
    let csv = result.to_csv();
    run.csv(&format!("{name}.csv"), &csv)?;
    run.json(&format!("{name}.json"), &serde_json::json!({ "config": cfg, "result": result }))?;
    run.say(format!("{name}: reps = {}, m = {}, seed = {}", cfg.reps, cfg.m, cfg.seed));
    run.say(csv.trim_end());
    Ok(Some(cfg.seed))
}

fn cmd_plotdata(run: &mut Run, s: &Settings, data: &Path, draws: usize) -> Outcome<()> {
    let d = run.dataset(data)?;
    describe(run, &d);
    let ens = ensemble(&d, s)?;
    let window = ens.window(s.window)?;
    run.csv("km.csv", &step_curve_csv(&kaplan_meier(&d)))?;
    run.csv("median.csv", &step_curve_csv(&fiducial_point_estimate(&ens, &window)))?;
    if ens.m() >= 2 {
        run.csv("band.csv", &band_csv(&curvewise_band(&ens, s.level, &window)?))?;
    }
    for c in Component::ALL {
        run.csv(&format!("ensemble_{}.csv", c.name()), &ensemble_csv(&ens, c, Some(draws)))?;
    }
    run.json("ensemble.json", &EnsembleMetadata::of(&ens, Some(draws)))?;
    run.say(format!("exported {} of {} draws", draws.min(ens.m()), ens.m()));
    Ok(())
}

fn execute(cli: &Cli, run: &mut Run) -> Outcome<Option<u64>> {
    if let Command::Simulate { config, reps } = &cli.command {
        return cmd_simulate(run, &cli.globals, config, *reps);
    }
    let s = Settings::resolve(&cli.globals)?;
    match &cli.command {
        Command::Fit { data } => cmd_fit(run, &s, data)?,
        Command::Ci { data, times } => cmd_ci(run, &s, data, times)?,
        Command::QuantileCi { data, q } => cmd_quantile(run, &s, data, q)?,
        Command::Band { data } => cmd_band(run, &s, data)?,
        Command::Test { data, null, null_curve, sided } => {
            cmd_test(run, &s, data, null.as_deref(), null_curve.as_deref(), *sided)?
        }
        Command::Test2 { a, b } => cmd_test2(run, &s, a, b.as_deref())?,
        Command::Logrank { a, b, fh_p, fh_q } => cmd_logrank(run, &s, a, b.as_deref(), *fh_p, *fh_q)?,
        Command::Plotdata { data, draws } => cmd_plotdata(run, &s, data, *draws)?,
        Command::Simulate { .. } => unreachable!(),
    }
    Ok(Some(s.seed))
}

fn valid_flags(argv: &[String]) -> String {
    let root = Cli::command();
    let mut flags: Vec<String> = root.get_arguments().filter_map(|a| a.get_long()).map(|l| format!("--{l}")).collect();
    let mut scope = String::from("global");
    if let Some(sub) = argv.iter().skip(1).find_map(|a| root.find_subcommand(a)) {
        scope = format!("`{}`", sub.get_name());
        flags.extend(sub.get_arguments().filter_map(|a| a.get_long()).map(|l| format!("--{l}")));
    }
    format!("valid {scope} flags: {}", flags.join(", "))
}

fn run_parsed(cli: Cli, argv: &[String]) -> i32 {
    let started = Instant::now();
    let out = cli.globals.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    if let Err(e) = std::fs::create_dir_all(&out) {
        eprintln!("error[Io]: {}: {e}", out.display());
        return 1;
    }
    let mut run = Run { out: out.clone(), outputs: Vec::new(), inputs: Vec::new(), summary: String::new() };
    let result = match cli.globals.threads {
        Some(0) => Err(Failure::Usage("--threads must be at least 1".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(&cli, &mut run)),
            Err(e) => Err(Failure::Data(Error::Io(e.to_string()))),
        },
        None => execute(&cli, &mut run),
    };
    let seed = match result {
        Ok(seed) => seed,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("{}", valid_flags(argv));
            return 2;
        }
        Err(Failure::Data(e)) => {
            eprintln!("error[{}]: {e}", e.name());
            return 1;
        }
    };

    let arguments: Vec<String> = argv.iter().skip(1).cloned().collect();
    let mut replay = arguments.clone();
    match &cli.command {
        Command::Simulate { .. } => replay.extend(override_flags(&cli.globals)),
        _ => replay.extend(Settings::resolve(&cli.globals).map(|s| s.flags()).unwrap_or_default()),
    }
    replay.extend(["--out".into(), out.display().to_string()]);
    let manifest = RunManifest {
        command: cli.command.name().into(),
        arguments,
        replay,
        seed,
        versions: BTreeMap::from([(env!("CARGO_PKG_NAME").to_string(), env!("CARGO_PKG_VERSION").to_string())]),
        inputs: std::mem::take(&mut run.inputs),
        outputs: std::mem::take(&mut run.outputs),
        threads: cli.globals.threads,
        wall_time_secs: started.elapsed().as_secs_f64(),
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    if let Err(e) = std::fs::write(out.join(MANIFEST_FILE), text) {
        eprintln!("error[Io]: {e}");
        return 1;
    }
    print!("{}", run.summary);
    println!("outputs in {} ({} files + {MANIFEST_FILE})", out.display(), manifest.outputs.len());
    0
}

/// Runs one command. `argv[0]` is the program name.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let text: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    match Cli::try_parse_from(&argv) {
        Ok(cli) => run_parsed(cli, &text),
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => {
                    eprintln!("{}", valid_flags(&text));
                    2
                }
            }
        }
    }
}
