//! Fiducial point estimate and pointwise intervals next to Kaplan-Meier.

use fiducial_survival::dataset::{parse_dataset, sort_and_validate, FormatOptions, TiePolicy};
use fiducial_survival::estimate::{fiducial_point_estimate, greenwood, greenwood_ci};
use fiducial_survival::gfd::sample_ensemble;
use fiducial_survival::infer::{pointwise_ci, Flavor};

const DATA: &str = "time,status
0.8,1
1.1,0
1.9,1
2.3,1
2.3,0
3.0,1
3.6,0
4.2,1
5.0,1
5.5,0
6.1,1
7.4,0
";

fn main() -> fiducial_survival::Result<()> {
    let raw = parse_dataset(DATA.as_bytes(), &FormatOptions::default())?;
    let data = sort_and_validate(&raw, TiePolicy::default());
    let ensemble = sample_ensemble(&data, 2000, 11)?;
    let window = ensemble.default_window();
    let median = fiducial_point_estimate(&ensemble, &window);
    let km = greenwood(&data);

    println!("{:>5} {:>8} {:>8} {:>17} {:>17} {:>17}", "t", "fid", "km", "FD-I", "FD-C", "greenwood");
    for t in [1.0, 2.0, 3.0, 4.0, 5.0, 6.0] {
        let i = pointwise_ci(&ensemble, t, 0.95, Flavor::Interp)?;
        let c = pointwise_ci(&ensemble, t, 0.95, Flavor::Conservative)?;
        let (gl, gu) = greenwood_ci(&km, t, 0.95)?;
        println!(
            "{t:>5.1} {:>8.4} {:>8.4}   [{:.3}, {:.3}]   [{:.3}, {:.3}]   [{:.3}, {:.3}]",
            median.eval(t),
            km.curve.eval(t),
            i.lower,
            i.upper,
            c.lower,
            c.upper,
            gl,
            gu
        );
    }
    Ok(())
}
