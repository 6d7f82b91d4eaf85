//! Error rates and widths of pointwise intervals over repeated samples.
//! Pass a replication count as the first argument (default 500).

use fiducial_survival::simlab::{run_ci_experiment, table1};

fn main() -> fiducial_survival::Result<()> {
    let reps = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(500);
    let result = run_ci_experiment(&table1(), &[1.0, 2.0, 3.0, 4.0], reps, 1000, 0.95, 20240101)?;
    print!("{}", result.to_csv());
    for row in &result.rows {
        let err: Vec<String> = row.cells.iter().map(|c| format!("{:.1}", c.two_sided_pct())).collect();
        println!("{} two-sided error %: {}", row.method, err.join(" "));
    }
    Ok(())
}
