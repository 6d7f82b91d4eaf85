//! Sup-norm confidence band around the pointwise median and whether it
//! covers the true curve.

use fiducial_survival::dataset::{sort_and_validate, TiePolicy};
use fiducial_survival::gfd::sample_ensemble;
use fiducial_survival::infer::curvewise_band;
use fiducial_survival::rng::RngStream;
use fiducial_survival::simlab::{fig2, sample_scenario, SurvivalCurve};

fn main() -> fiducial_survival::Result<()> {
    let spec = fig2();
    let raw = sample_scenario(&spec, &mut RngStream::new(3, 0).rng())?;
    let data = sort_and_validate(&raw, TiePolicy::default());
    let ensemble = sample_ensemble(&data, 1000, 3)?;
    let band = curvewise_band(&ensemble, 0.95, &ensemble.default_window())?;
    let truth = SurvivalCurve(&spec.groups[0].failure);
    println!("n = {}, failures = {}, tau = {:.3}", data.n(), data.failure_count(), band.window.tau());
    println!("radius = {:.4}, covers truth: {}", band.radius, band.contains(&truth));
    for t in [5.0, 10.0, 15.0, 18.0, 20.0] {
        if t <= band.window.tau() {
            println!("t = {t:>4}: [{:.3}, {:.3}]", band.lower_at(t), band.upper_at(t));
        }
    }
    Ok(())
}
