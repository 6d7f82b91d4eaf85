//! One draw from the fiducial distribution of the failure-time distribution.
//!
//! Sorted uniforms are assigned to the time-ordered observations by a random
//! permutation built sequentially: a failure takes the smallest unassigned
//! order statistic, a censored observation takes one chosen uniformly from
//! those still unassigned. This realizes the uniform law over all
//! permutations whose inverse image is nonempty.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::curve::{LogLinearCurve, StepCurve};
use crate::dataset::SortedDataset;
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Assignment of sorted uniforms to the ordered observations, with the
/// envelope vectors it induces on the distribution-function scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiducialDraw {
    /// `ranks[i]`: 0-based order-statistic index given to observation `i`.
    pub ranks: Vec<u32>,
    /// `values[i]`: the uniform given to observation `i`.
    pub values: Vec<f64>,
    /// Length `n + 1`. `upper_fid[i]` is the smallest uniform still unassigned
    /// when observation `i` is reached; `upper_fid[n] = 1`.
    pub upper_fid: Vec<f64>,
    /// Length `n + 1`. `lower_fid[0] = 0`; `lower_fid[i + 1]` is the largest
    /// failure uniform among observations `0..=i`.
    pub lower_fid: Vec<f64>,
}

impl FiducialDraw {
    fn with_len(n: usize) -> Self {
        FiducialDraw {
            ranks: vec![0; n],
            values: vec![0.0; n],
            upper_fid: vec![1.0; n + 1],
            lower_fid: vec![0.0; n + 1],
        }
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    /// `S^U(t)` without materializing the step curve.
    pub fn upper_survival_at(&self, data: &SortedDataset, t: f64) -> f64 {
        let k = data.times().partition_point(|&y| y <= t);
        1.0 - self.lower_fid[k]
    }

    /// `S^L(t)` without materializing the step curve.
    pub fn lower_survival_at(&self, data: &SortedDataset, t: f64) -> f64 {
        let k = data.times().partition_point(|&y| y <= t);
        1.0 - self.upper_fid[k]
    }
}

// Above this size the unassigned set lives in a Fenwick tree; below it a
// descending vector is faster. Both select the same element for the same draw.
const FENWICK_THRESHOLD: usize = 2048;

enum Unassigned {
    /// Unassigned ranks in descending order, so the minimum is at the end.
    Descending(Vec<u32>),
    Fenwick(Fenwick),
}

impl Unassigned {
    fn reset(&mut self, n: usize) {
        match self {
            Unassigned::Descending(v) => {
                v.clear();
                v.extend((0..n as u32).rev());
            }
            Unassigned::Fenwick(f) => f.fill(n),
        }
    }

    fn min(&self) -> u32 {
        match self {
            Unassigned::Descending(v) => *v.last().unwrap(),
            Unassigned::Fenwick(f) => f.kth(0),
        }
    }

    /// Removes and returns the `k`-th smallest (0-based) unassigned rank.
    fn take_kth(&mut self, k: usize) -> u32 {
        match self {
            Unassigned::Descending(v) => {
                let idx = v.len() - 1 - k;
                v.remove(idx)
            }
            Unassigned::Fenwick(f) => {
                let r = f.kth(k);
                f.remove(r);
                r
            }
        }
    }
}

/// Order-statistic tree over `0..n` supporting k-th selection and deletion.
struct Fenwick {
    tree: Vec<u32>,
    log: usize,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        let mut f = Fenwick { tree: vec![0; n + 1], log: 0 };
        f.fill(n);
        f
    }

    fn fill(&mut self, n: usize) {
        self.tree.clear();
        self.tree.resize(n + 1, 0);
        for i in 1..=n {
            self.tree[i] += 1;
            let j = i + (i & i.wrapping_neg());
            if j <= n {
                self.tree[j] += self.tree[i];
            }
        }
        self.log = usize::BITS as usize - n.leading_zeros() as usize;
    }

    fn remove(&mut self, rank: u32) {
        let n = self.tree.len() - 1;
        let mut i = rank as usize + 1;
        while i <= n {
            self.tree[i] -= 1;
            i += i & i.wrapping_neg();
        }
    }

    fn kth(&self, k: usize) -> u32 {
        let n = self.tree.len() - 1;
        let mut pos = 0;
        let mut rem = k as u32 + 1;
        for b in (0..self.log).rev() {
            let next = pos + (1 << b);
            if next <= n && self.tree[next] < rem {
                pos = next;
                rem -= self.tree[next];
            }
        }
        pos as u32
    }
}

/// Reusable workspace for drawing from one dataset.
pub struct Sampler<'a> {
    data: &'a SortedDataset,
    sorted_u: Vec<f64>,
    unassigned: Unassigned,
    draw: FiducialDraw,
    interp: InterpScratch,
    curve: LogLinearCurve,
}

impl<'a> Sampler<'a> {
    pub fn new(data: &'a SortedDataset) -> Self {
        Self::with_strategy(data, data.n() > FENWICK_THRESHOLD)
    }

    fn with_strategy(data: &'a SortedDataset, fenwick: bool) -> Self {
        let n = data.n();
        let unassigned = if fenwick {
            Unassigned::Fenwick(Fenwick::new(n))
        } else {
            Unassigned::Descending(Vec::with_capacity(n))
        };
        Sampler {
            data,
            sorted_u: vec![0.0; n],
            unassigned,
            draw: FiducialDraw::with_len(n),
            interp: InterpScratch::default(),
            curve: LogLinearCurve::from_raw(vec![0.0], vec![0.0], 0.0),
        }
    }

    pub fn data(&self) -> &SortedDataset {
        self.data
    }

    pub fn draw(&self) -> &FiducialDraw {
        &self.draw
    }

    /// Fills the workspace with a fresh draw.
    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> &FiducialDraw {
        let n = self.data.n();
        fill_sorted_uniforms(rng, &mut self.sorted_u);
        self.unassigned.reset(n);
        let draw = &mut self.draw;
        draw.lower_fid[0] = 0.0;
        for (i, &failed) in self.data.failed().iter().enumerate() {
            draw.upper_fid[i] = self.sorted_u[self.unassigned.min() as usize];
            let rank = if failed {
                self.unassigned.take_kth(0)
            } else {
                let remaining = n - i;
                self.unassigned.take_kth(rng.random_range(0..remaining))
            };
            let u = self.sorted_u[rank as usize];
            draw.ranks[i] = rank;
            draw.values[i] = u;
            draw.lower_fid[i + 1] = if failed { u } else { draw.lower_fid[i] };
        }
        draw.upper_fid[n] = 1.0;
        &self.draw
    }

    /// Log-linear curve for the current draw.
    pub fn interp(&mut self) -> Result<LogLinearCurve> {
        let mut times = Vec::new();
        let mut logs = Vec::new();
        let slope = build_interp(&self.draw, self.data, &mut times, &mut logs, &mut self.interp)?;
        Ok(LogLinearCurve::from_raw(times, logs, slope))
    }

    /// Log-linear curve for the current draw, built in a reused buffer.
    pub fn interp_in_place(&mut self) -> Result<&LogLinearCurve> {
        let (times, logs, slope) = self.curve.parts_mut();
        *slope = build_interp(&self.draw, self.data, times, logs, &mut self.interp)?;
        Ok(&self.curve)
    }
}

/// Sorted iid U(0,1) via normalized exponential spacings.
fn fill_sorted_uniforms<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    let mut acc = 0.0;
    for slot in out.iter_mut() {
        acc += -(1.0 - rng.random::<f64>()).ln();
        *slot = acc;
    }
    let total = acc - (1.0 - rng.random::<f64>()).ln();
    for slot in out.iter_mut() {
        *slot /= total;
    }
}

/// Draws one permutation-based fiducial sample.
pub fn sample_permutation(data: &SortedDataset, stream: RngStream) -> FiducialDraw {
    let mut sampler = Sampler::new(data);
    let mut rng = stream.rng();
    sampler.sample(&mut rng).clone()
}

fn check_len(draw: &FiducialDraw, data: &SortedDataset) -> Result<()> {
    if draw.len() != data.n() || draw.upper_fid.len() != data.n() + 1 || draw.lower_fid.len() != data.n() + 1 {
        return Err(Error::MismatchedDraw { expected: data.n(), got: draw.len() });
    }
    Ok(())
}

/// Lower and upper survival envelopes `(S^L, S^U)` of a draw.
///
/// `S^U = 1 - F^L` steps only at failure times. `S^L = 1 - F^U` equals
/// `1 - upper_fid[i]` on `[y_{i-1}, y_i)` and is zero past the last observation.
pub fn draw_bounds(draw: &FiducialDraw, data: &SortedDataset) -> Result<(StepCurve, StepCurve)> {
    check_len(draw, data)?;
    let times = data.times();
    let upper = StepCurve::from_steps(
        data.failed()
            .iter()
            .enumerate()
            .filter(|(_, f)| **f)
            .map(|(i, _)| (times[i], 1.0 - draw.lower_fid[i + 1])),
    );
    let lower = StepCurve::from_steps(
        std::iter::once((0.0, 1.0 - draw.upper_fid[0]))
            .chain(times.iter().enumerate().map(|(i, &t)| (t, 1.0 - draw.upper_fid[i + 1]))),
    );
    Ok((lower, upper))
}

/// Log-linear fiducial curve `S^I` of a draw.
pub fn log_linear_curve(draw: &FiducialDraw, data: &SortedDataset) -> Result<LogLinearCurve> {
    check_len(draw, data)?;
    let mut times = Vec::new();
    let mut logs = Vec::new();
    let slope = build_interp(draw, data, &mut times, &mut logs, &mut InterpScratch::default())?;
    Ok(LogLinearCurve::from_raw(times, logs, slope))
}

#[derive(Default)]
struct InterpScratch {
    /// Censored points since the last failure: (time, own log value, envelope bound).
    pending: Vec<(f64, f64, f64)>,
    hull: Vec<(f64, f64)>,
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Interpolates log survival linearly between `(0, 0)` and the failure points
/// `(y_i, log(1 - u_i))`. Between two failures the chord is replaced by the
/// least concave majorant of the censored points `(y_j, log(1 - u_j))` in the
/// gap, so the curve never drops below the lower envelope. After the last
/// failure a single line continues with slope `max(s_0, s_1, ..., s_k)`: `s_0`
/// joins the previous failure point (or the origin) to the last one, `s_j`
/// joins the last failure point to the `j`-th later censored point.
fn build_interp(
    draw: &FiducialDraw,
    data: &SortedDataset,
    times: &mut Vec<f64>,
    logs: &mut Vec<f64>,
    scratch: &mut InterpScratch,
) -> Result<f64> {
    if data.failure_count() == 0 {
        return Err(Error::NoFailures);
    }
    times.clear();
    logs.clear();
    times.push(0.0);
    logs.push(0.0);
    let pending = &mut scratch.pending;
    let hull = &mut scratch.hull;
    pending.clear();

    let mut prev_failure = (0.0, 0.0);
    let mut last_failure = (0.0, 0.0);
    let (ys, failed) = (data.times(), data.failed());
    let mut i = 0;
    while i < ys.len() {
        let y = ys[i];
        if !failed[i] {
            // The envelope bound only exceeds the own value when the next
            // failure time is tied; it keeps grid values above S^L there.
            let u = draw.values[i];
            let bound = (1.0 - u.min(draw.upper_fid[i + 1])).ln();
            pending.push((y, (1.0 - u).ln(), bound));
            i += 1;
            continue;
        }
        // a run of tied failures anchors at its last (lowest) value
        let mut j = i;
        while j + 1 < ys.len() && failed[j + 1] && ys[j + 1] == y {
            j += 1;
        }
        i = j + 1;
        let point = (y, (1.0 - draw.values[j]).ln());
        let anchor = (*times.last().unwrap(), *logs.last().unwrap());
        prev_failure = last_failure;
        last_failure = point;
        if y == anchor.0 {
            // failures at t = 0
            *logs.last_mut().unwrap() = point.1;
            pending.clear();
            continue;
        }
        hull.clear();
        hull.push(anchor);
        for p in pending.iter().map(|&(t, _, b)| (t, b)).chain(std::iter::once(point)) {
            while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) >= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        for &(t, l) in &hull[1..] {
            times.push(t);
            logs.push(l);
        }
        pending.clear();
    }

    let (ty, tl) = last_failure;
    let mut slope = f64::NEG_INFINITY;
    if ty > prev_failure.0 {
        slope = (tl - prev_failure.1) / (ty - prev_failure.0);
    }
    for &(y, l, _) in pending.iter() {
        if y > ty {
            slope = slope.max((l - tl) / (y - ty));
        }
    }
    Ok(slope.min(0.0))
}
