//! Rejection rates of the fiducial two-sample test and the log-rank family.
//! Arguments: preset name (default table6) and replication count (default 100).

use fiducial_survival::simlab::{preset, run_power_experiment};

fn main() -> fiducial_survival::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "table6".into());
    let reps = args.next().and_then(|a| a.parse().ok()).unwrap_or(100);
    let spec = preset(&name).expect("known preset");
    let result = run_power_experiment(&spec, reps, 1000, 0.05, 20240106)?;
    print!("{}", result.to_csv());
    Ok(())
}
