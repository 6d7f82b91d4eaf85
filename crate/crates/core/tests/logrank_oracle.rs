mod oracles;

use fiducial_survival::dataset::{sort_and_validate, SurvivalDataset, TiePolicy};
use fiducial_survival::logrank::{brownian_sup_tail, sup_logrank, weighted_logrank, WeightSpec};
use statrs::function::erf::erfc;

fn data(times: &[f64], failed: &[bool]) -> fiducial_survival::dataset::SortedDataset {
    sort_and_validate(&SurvivalDataset::from_parts(times, failed).unwrap(), TiePolicy::default())
}

#[test]
fn two_at_risk_versus_one() {
    // t = 1: 2 at risk, 1 event in A, E_A = 1/2, V = 1/4. t = 2: one at risk, V = 0.
    let r = weighted_logrank(&data(&[1.0], &[true]), &data(&[2.0], &[true]), WeightSpec::LR).unwrap();
    assert_eq!(r.statistic, 1.0);
    let exact = erfc(1.0 / 2f64.sqrt());
    assert!((r.p_value - exact).abs() < 1e-10, "{} vs {exact}", r.p_value);
    assert!((r.p_value - 0.3173).abs() < 5e-5);
}

#[test]
fn brownian_tail_against_reflection_series() {
    assert!((brownian_sup_tail(1.96) - 0.0999).abs() < 5e-4);
    for x in [0.3, 0.7, 1.0, 1.5, 1.96, 2.5, 3.5] {
        let a = brownian_sup_tail(x);
        let b = oracles::brownian_sup_tail_reference(x);
        assert!((a - b).abs() < 1e-9, "x = {x}: {a} vs {b}");
    }
}

#[test]
fn gehan_weights_by_hand() {
    // A: 1F 3F, B: 2F 4C. At t = 1, 2, 3 the risk sets are (2,2), (1,2), (1,1).
    let a = data(&[1.0, 3.0], &[true, true]);
    let b = data(&[2.0, 4.0], &[true, false]);
    let r = weighted_logrank(&a, &b, WeightSpec::GW).unwrap();
    let score = 4.0 * (1.0 - 0.5) + 3.0 * (0.0 - 1.0 / 3.0) + 2.0 * (1.0 - 0.5);
    let var = 16.0 * 0.25 + 9.0 * (2.0 / 9.0) + 4.0 * 0.25;
    assert!((r.score - score).abs() < 1e-12);
    assert!((r.variance - var).abs() < 1e-12);
    let s = sup_logrank(&a, &b, WeightSpec::LR).unwrap();
    // partial sums 0.5, 0.1667, 0.6667
    assert!((s.statistic - (2.0 / 3.0) / (0.25f64 + 2.0 / 9.0 + 0.25).sqrt()).abs() < 1e-12);
}
