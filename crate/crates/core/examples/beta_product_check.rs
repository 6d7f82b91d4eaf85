//! The upper envelope of the permutation sampler against the product of
//! independent beta variables, and both against the modified Kaplan-Meier
//! mean.

use fiducial_survival::dataset::{sort_and_validate, SurvivalDataset, TiePolicy};
use fiducial_survival::gfd::{beta_product_values, expected_upper, Sampler};
use fiducial_survival::rng::RngStream;

fn main() {
    let times = [0.5, 1.0, 1.4, 2.0, 2.2, 3.1, 3.5, 4.0, 4.8, 5.5];
    let failed = [true, false, true, true, false, true, false, true, true, false];
    let data = sort_and_validate(&SurvivalDataset::from_parts(&times, &failed).unwrap(), TiePolicy::default());
    let draws = 100_000;
    let events = data.event_times().to_vec();

    let mut perm = vec![0.0; events.len()];
    let mut sampler = Sampler::new(&data);
    let mut rng = RngStream::new(1, 0).rng();
    for _ in 0..draws {
        let d = sampler.sample(&mut rng);
        for (acc, &t) in perm.iter_mut().zip(&events) {
            *acc += d.upper_survival_at(&data, t);
        }
    }

    let mut beta = vec![0.0; events.len()];
    let mut rng = RngStream::new(2, 0).rng();
    let mut buf = Vec::new();
    for _ in 0..draws {
        beta_product_values(&data, &mut rng, &mut buf);
        for (acc, v) in beta.iter_mut().zip(&buf) {
            *acc += v;
        }
    }

    println!("{:>6} {:>10} {:>10} {:>10}", "t", "perm", "beta", "exact");
    for (i, exact) in expected_upper(&data).into_iter().enumerate() {
        println!("{:>6} {:>10.5} {:>10.5} {:>10.5}", events[i], perm[i] / draws as f64, beta[i] / draws as f64, exact);
    }
}
