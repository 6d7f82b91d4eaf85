mod oracles;

use fiducial_survival::rng::RngStream;
use rand::Rng;

#[test]
fn expected_envelopes_bracket_kaplan_meier() {
    let mut rng = RngStream::new(77, 0).rng();
    for k in 0..100 {
        let n = rng.random_range(2..60);
        let times: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 10.0).collect();
        let mut failed: Vec<bool> = (0..n).map(|_| rng.random_bool(0.6)).collect();
        failed[0] = true;
        oracles::lemma_sandwich(&times, &failed).unwrap_or_else(|e| panic!("dataset {k}: {e}"));
    }
}

#[test]
fn sandwich_on_a_small_example() {
    // times 1F 2C 3F 4F: K = 4, 2, 1
    let rows = oracles::rational_sandwich(&[1.0, 2.0, 3.0, 4.0], &[true, false, true, true]);
    let f: Vec<(f64, f64, f64)> =
        rows.iter().map(|(l, m, u)| (oracles::to_f64(l), oracles::to_f64(m), oracles::to_f64(u))).collect();
    assert!((f[0].2 - 0.8).abs() < 1e-15 && (f[0].1 - 0.75).abs() < 1e-15 && (f[0].0 - 0.6).abs() < 1e-15);
    assert!((f[1].2 - 0.8 * 2.0 / 3.0).abs() < 1e-15 && (f[1].1 - 0.375).abs() < 1e-15);
    assert_eq!(f[2].0, 0.0);
}
