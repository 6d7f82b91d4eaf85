use super::{Curve, EvaluationWindow, StepCurve};

/// 1-based order-statistic index `ceil(m * p)`, clamped to `[1, m]`.
///
/// A small tolerance absorbs representation error so that e.g. `1000 * 0.025`
/// selects the 25th value, not the 26th.
pub fn order_stat_index(m: usize, p: f64) -> usize {
    assert!(m >= 1, "empty sample");
    let k = (m as f64 * p - 1e-9).ceil();
    (k.max(1.0) as usize).min(m)
}

/// Empirical `p`-quantile by the inclusive order-statistic rule.
pub fn empirical_quantile(values: &[f64], p: f64) -> f64 {
    let mut v = values.to_vec();
    let k = order_stat_index(v.len(), p) - 1;
    *v.select_nth_unstable_by(k, f64::total_cmp).1
}

/// Sample median; averages the two central order statistics for even sizes.
/// Reorders `values`.
pub fn median_in_place(values: &mut [f64]) -> f64 {
    let m = values.len();
    assert!(m >= 1, "empty sample");
    let hi = m / 2;
    let (left, upper, _) = values.select_nth_unstable_by(hi, f64::total_cmp);
    let upper = *upper;
    if m % 2 == 1 {
        return upper;
    }
    let lower = left.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    0.5 * (lower + upper)
}

pub fn pointwise_quantile<C: Curve>(curves: &[C], t: f64, p: f64) -> f64 {
    let values: Vec<f64> = curves.iter().map(|c| c.eval(t)).collect();
    empirical_quantile(&values, p)
}

/// Pointwise median over the window grid, emitted as a right-continuous step
/// curve whose value on `[g_k, g_{k+1})` is the median at `g_k`.
pub fn pointwise_median_curve<C: Curve>(curves: &[C], window: &EvaluationWindow) -> StepCurve {
    let mut column = vec![0.0; curves.len()];
    let steps: Vec<(f64, f64)> = window
        .grid()
        .iter()
        .map(|&g| {
            for (slot, c) in column.iter_mut().zip(curves) {
                *slot = c.eval(g);
            }
            (g, median_in_place(&mut column))
        })
        .collect();
    StepCurve::from_steps(steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::LogLinearCurve;

    #[test]
    fn order_statistics() {
        assert_eq!(order_stat_index(1000, 0.025), 25);
        assert_eq!(order_stat_index(1000, 0.975), 975);
        assert_eq!(order_stat_index(10, 0.5), 5);
        assert_eq!(order_stat_index(1, 0.3), 1);
        let v: Vec<f64> = (1..=10).rev().map(|i| i as f64 / 10.0).collect();
        assert_eq!(empirical_quantile(&v, 0.5), 0.5);
        let w: Vec<f64> = (1..=1000).rev().map(|i| i as f64).collect();
        assert_eq!(empirical_quantile(&w, 0.025), 25.0);
    }

    #[test]
    fn medians() {
        assert_eq!(median_in_place(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median_in_place(&mut [4.0, 1.0, 3.0, 2.0]), 2.5);
        assert_eq!(median_in_place(&mut [7.0]), 7.0);
    }

    #[test]
    fn singleton_and_pair_medians() {
        let c1 = LogLinearCurve::new(vec![0.0, 1.0], vec![0.0, -1.0], -1.0).unwrap();
        let c2 = LogLinearCurve::new(vec![0.0, 1.0], vec![0.0, -0.5], -0.5).unwrap();
        let w = EvaluationWindow::new(2.0, [0.5, 1.0, 1.5]).unwrap();
        assert_eq!(pointwise_quantile(&[c1.clone()], 0.7, 0.5), c1.eval(0.7));

        let single = pointwise_median_curve(&[c1.clone()], &w);
        for &g in w.grid() {
            assert_eq!(single.eval(g), c1.eval(g));
        }
        let pair = pointwise_median_curve(&[c1.clone(), c2.clone()], &w);
        for &g in w.grid() {
            assert_eq!(pair.eval(g), 0.5 * (c1.eval(g) + c2.eval(g)));
        }
        assert!(pair.values().windows(2).all(|v| v[1] <= v[0]));
    }
}
