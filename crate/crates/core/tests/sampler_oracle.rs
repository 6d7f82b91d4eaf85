mod oracles;

use fiducial_survival::rng::RngStream;
use oracles::{all_patterns, brute_force_set, check_pattern, constraint_set_nonempty};

#[test]
fn constraint_oracle_by_hand() {
    // failure, censored, failure: the censored point may take any rank above the first failure's.
    let set = brute_force_set(&[true, false, true]);
    let expect: std::collections::BTreeSet<Vec<u32>> = [vec![0, 1, 2], vec![0, 2, 1]].into_iter().collect();
    assert_eq!(set, expect);
    assert!(!constraint_set_nonempty(&[true, true], &[1, 0]));
    assert_eq!(brute_force_set(&[false, false, false]).len(), 6);
}

#[test]
fn reachable_set_and_uniformity_for_every_pattern() {
    for (i, failed) in all_patterns(6).into_iter().enumerate() {
        let c = check_pattern(&failed, 100_000, RngStream::new(0x5eed, i as u64));
        assert!(c.reachable_matches, "reachable set differs for {failed:?}");
        assert!(c.chi2_p > 0.001, "frequencies not uniform for {failed:?}: p = {}", c.chi2_p);
    }
}
