//! Sup-norm functionals over a window `[0, tau]`.
//!
//! Candidates are the window ends, every breakpoint of either curve (evaluated
//! on both sides), and interior critical points of each elementary piece. A
//! constant minus a monotone function is monotone, so step/anything pieces
//! need no interior search; two log-linear pieces have at most one critical
//! point, found in closed form. Pieces without a closed form are searched
//! numerically.

use super::{Curve, EvaluationWindow, Shape};

/// `sup_{0 <= t <= tau} |a(t) - b(t)|`, left limits included.
pub fn sup_distance<A, B>(a: &A, b: &B, window: &EvaluationWindow) -> f64
where
    A: Curve + ?Sized,
    B: Curve + ?Sized,
{
    sup_signed(a, b, window).max(sup_signed(b, a, window))
}

/// `sup_{0 <= t <= tau} (a(t) - b(t))`, left limits included.
pub fn sup_signed<A, B>(a: &A, b: &B, window: &EvaluationWindow) -> f64
where
    A: Curve + ?Sized,
    B: Curve + ?Sized,
{
    let tau = window.tau();
    let mut pts = vec![0.0, tau];
    a.breakpoints(0.0, tau, &mut pts);
    b.breakpoints(0.0, tau, &mut pts);
    pts.sort_by(f64::total_cmp);
    pts.dedup();

    let diff = |t: f64| a.eval(t) - b.eval(t);
    let mut best = f64::NEG_INFINITY;
    for (k, &p) in pts.iter().enumerate() {
        best = best.max(diff(p));
        if k > 0 {
            best = best.max(a.left_limit(p) - b.left_limit(p));
        }
        if let Some(&q) = pts.get(k + 1) {
            if let Some(v) = interior_max(a, b, p, q) {
                best = best.max(v);
            }
        }
    }
    best
}

fn interior_max<A, B>(a: &A, b: &B, lo: f64, hi: f64) -> Option<f64>
where
    A: Curve + ?Sized,
    B: Curve + ?Sized,
{
    let width = hi - lo;
    if width <= 0.0 {
        return None;
    }
    match (a.shape_on(lo, hi), b.shape_on(lo, hi)) {
        (Shape::Constant(_), _) | (_, Shape::Constant(_)) => None,
        (
            Shape::LogLinear { log_start: la, slope: sa },
            Shape::LogLinear { log_start: lb, slope: sb },
        ) => {
            // sa * exp(la + sa h) = sb * exp(lb + sb h)
            if sa == sb || sa >= 0.0 || sb >= 0.0 {
                return None;
            }
            let h = ((-sb).ln() - (-sa).ln() + lb - la) / (sa - sb);
            (h > 0.0 && h < width).then(|| a.eval(lo + h) - b.eval(lo + h))
        }
        _ => Some(numeric_max(|t| a.eval(t) - b.eval(t), lo, hi)),
    }
}

fn numeric_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    const SCAN: usize = 64;
    let step = (hi - lo) / SCAN as f64;
    let (mut best_i, mut best) = (0, f64::NEG_INFINITY);
    for i in 1..SCAN {
        let v = f(lo + step * i as f64);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    // golden-section refinement on the bracketing cell pair
    let (mut x0, mut x1) = (lo + step * (best_i as f64 - 1.0), lo + step * (best_i as f64 + 1.0));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = x1 - g * (x1 - x0);
    let mut d = x0 + g * (x1 - x0);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc > fd {
            x1 = d;
            d = c;
            fd = fc;
            c = x1 - g * (x1 - x0);
            fc = f(c);
        } else {
            x0 = c;
            c = d;
            fc = fd;
            d = x0 + g * (x1 - x0);
            fd = f(d);
        }
    }
    best.max(fc).max(fd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{ConstantCurve, LogLinearCurve, StepCurve};
    use proptest::prelude::*;

    fn window(tau: f64) -> EvaluationWindow {
        EvaluationWindow::new(tau, []).unwrap()
    }

    fn dense_sup<A: Curve, B: Curve>(a: &A, b: &B, tau: f64, n: usize) -> f64 {
        (0..=n)
            .map(|k| k as f64 * tau / n as f64)
            .map(|t| (a.eval(t) - b.eval(t)).abs())
            .fold(0.0, f64::max)
    }

    fn three_point_pair() -> (StepCurve, LogLinearCurve) {
        let a = StepCurve::new(vec![0.5, 1.0, 1.5], vec![0.9, 0.3, 0.25]).unwrap();
        let b = LogLinearCurve::new(
            vec![0.0, 1.0, 2.0],
            vec![0.0, 0.7f64.ln(), 0.4f64.ln()],
            -1.0,
        )
        .unwrap();
        (a, b)
    }

    #[test]
    fn identical_curves_have_zero_distance() {
        let (a, b) = three_point_pair();
        assert_eq!(sup_distance(&a, &a, &window(2.0)), 0.0);
        assert_eq!(sup_distance(&b, &b, &window(2.0)), 0.0);
    }

    #[test]
    fn extreme_curves() {
        let one = ConstantCurve(1.0);
        let drop = StepCurve::new(vec![1.0], vec![0.0]).unwrap();
        assert_eq!(sup_distance(&one, &drop, &window(2.0)), 1.0);
    }

    #[test]
    fn matches_dense_grid_oracle() {
        let (a, b) = three_point_pair();
        let exact = sup_distance(&a, &b, &window(2.0));
        let dense = dense_sup(&a, &b, 2.0, 1_000_000);
        assert!((exact - dense).abs() < 1e-12, "exact {exact} dense {dense}");
        assert!((exact - 0.4).abs() < 1e-12);
    }

    #[test]
    fn left_limits_count() {
        // the difference peaks just before the knot at 1
        let a = StepCurve::new(vec![1.0], vec![0.2]).unwrap();
        let b = LogLinearCurve::new(vec![0.0, 2.0], vec![0.0, 0.1f64.ln()], -1.0).unwrap();
        let exact = sup_signed(&a, &b, &window(2.0));
        assert!((exact - (1.0 - 0.1f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn two_log_linear_pieces_use_critical_point() {
        let a = LogLinearCurve::new(vec![0.0], vec![0.0], -0.5).unwrap();
        let b = LogLinearCurve::new(vec![0.0], vec![0.0], -2.0).unwrap();
        let exact = sup_distance(&a, &b, &window(5.0));
        // max of e^{-t/2} - e^{-2t} at t = ln(4) / 1.5
        let t = 4f64.ln() / 1.5;
        let truth = (-0.5 * t).exp() - (-2.0 * t).exp();
        assert!((exact - truth).abs() < 1e-14);
    }

    fn arb_step() -> impl Strategy<Value = StepCurve> {
        prop::collection::vec((0.01f64..3.0, 0.0f64..1.0), 1..6).prop_map(|mut v| {
            v.sort_by(|x, y| x.0.total_cmp(&y.0));
            v.dedup_by(|x, y| x.0 == y.0);
            let mut level = 1.0;
            let steps: Vec<(f64, f64)> = v
                .into_iter()
                .map(|(t, f)| {
                    level *= f;
                    (t, level)
                })
                .collect();
            StepCurve::from_steps(steps)
        })
    }

    fn arb_loglinear() -> impl Strategy<Value = LogLinearCurve> {
        (prop::collection::vec((0.05f64..1.0, 0.0f64..1.5), 1..5), 0.0f64..2.0).prop_map(|(v, tail)| {
            let (mut t, mut l) = (0.0, 0.0);
            let (mut ts, mut ls) = (vec![0.0], vec![0.0]);
            for (dt, dl) in v {
                t += dt;
                l -= dl;
                ts.push(t);
                ls.push(l);
            }
            LogLinearCurve::new(ts, ls, -tail).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn exact_dominates_dense_grid(a in arb_step(), b in arb_loglinear()) {
            let w = window(3.0);
            let exact = sup_distance(&a, &b, &w);
            let dense = dense_sup(&a, &b, 3.0, 20_000);
            prop_assert!(dense <= exact + 1e-12);
            prop_assert!(exact - dense < 1e-3);
        }

        #[test]
        fn metric_axioms(a in arb_step(), b in arb_loglinear(), c in arb_step()) {
            let w = window(3.0);
            let ab = sup_distance(&a, &b, &w);
            let ba = sup_distance(&b, &a, &w);
            prop_assert_eq!(ab, ba);
            let ac = sup_distance(&a, &c, &w);
            let cb = sup_distance(&c, &b, &w);
            prop_assert!(ab <= ac + cb + 1e-12);
        }

        #[test]
        fn log_linear_pairs_match_dense(a in arb_loglinear(), b in arb_loglinear()) {
            let w = window(3.0);
            let exact = sup_distance(&a, &b, &w);
            let dense = dense_sup(&a, &b, 3.0, 20_000);
            prop_assert!(dense <= exact + 1e-12);
            prop_assert!(exact - dense < 1e-3);
        }
    }
}
