//! Finite-size trends of the Kerr first-order transition.

use liouvillian::analysis::{scan_params, ScanOptions, ScanRecord};
use liouvillian::models::ModelParams;

const STEP: f64 = 0.005;

fn kerr_scan(n: f64) -> Vec<ScanRecord> {
    let base = ModelParams::KerrThermo {
        delta: 10.0,
        u_tilde: 10.0,
        f_tilde: 2.0,
        gamma: 1.0,
        n,
        cutoff: Some((6.0 * n).ceil().max(20.0) as usize),
    };
    let grid: Vec<f64> = (0..=140).map(|i| 2.0 + STEP * i as f64).collect();
    let recs = scan_params(&base, "f_tilde", &grid, &ScanOptions::default()).unwrap();
    assert!(recs.iter().all(|r| r.is_ok()));
    recs
}

#[test]
fn transition_sharpens_with_n() {
    let mut widths = Vec::new();
    let mut slopes = Vec::new();
    for n in [5.0, 10.0, 15.0] {
        let recs = kerr_scan(n);
        let width = recs.iter().filter(|r| r.one_minus_f < 1e-2).count() as f64 * STEP;
        let slope = recs
            .windows(2)
            .map(|w| (w[1].density - w[0].density) / STEP)
            .fold(0.0f64, f64::max);
        widths.push(width);
        slopes.push(slope);
    }
    assert!(widths.iter().all(|w| *w > 0.0), "{widths:?}");
    assert!(widths.windows(2).all(|w| w[1] < w[0]), "1 - f < 1e-2 window widths {widths:?}");
    assert!(slopes.windows(2).all(|w| w[1] > w[0]), "maximal density slopes {slopes:?}");
}
