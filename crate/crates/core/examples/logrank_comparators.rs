//! All twelve weighted and supremum log-rank tests on one simulated pair.

use fiducial_survival::dataset::{sort_and_validate, TiePolicy};
use fiducial_survival::logrank::all_variants;
use fiducial_survival::rng::RngStream;
use fiducial_survival::simlab::{sample_scenario, table7};

fn main() -> fiducial_survival::Result<()> {
    let raw = sample_scenario(&table7(), &mut RngStream::new(4, 0).rng())?;
    let groups = raw.split_by_group();
    let a = sort_and_validate(&groups["A"], TiePolicy::default());
    let b = sort_and_validate(&groups["B"], TiePolicy::default());
    for r in all_variants(&a, &b)? {
        println!("{:<5} statistic = {:>9.4}  p = {:.5}", r.test, r.statistic, r.p_value);
    }
    Ok(())
}
