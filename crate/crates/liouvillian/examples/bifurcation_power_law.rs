//! Finite-size bifurcation of the two-photon driven Kerr resonator.
//!
//! For each `N` the slowest odd-parity eigenvalue turns from a complex pair into a real
//! one at `G_B(N)`; the sequence is fitted to `G_B = G_c + A N^{-exponent}`.
//!
//! ```text
//! cargo run --release --example bifurcation_power_law
//! ```

use liouvillian::analysis::{power_law_fit, sector_bifurcation};
use liouvillian::models::two_photon_thermo;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid: Vec<f64> = (0..=44).map(|i| 9.0 + 0.25 * i as f64).collect();
    let t = std::time::Instant::now();
    let mut points = Vec::new();
    for n in [5.0, 8.0, 11.0, 14.0, 17.0, 20.0] {
        let cutoff = ((3.0 * n) as usize + 20).max(30);
        let gb = sector_bifurcation(
            |g| two_photon_thermo(-10.0, 10.0, g, 1.0, 1.0, n, cutoff),
            &grid,
            1e-6,
            6,
        )?;
        println!("N = {n:>4}  cutoff {cutoff:>3}  G_B = {gb:.4}");
        points.push((n, gb));
    }
    let fit = power_law_fit(&points)?;
    println!(
        "G_c = {:.3}  A = {:.2}  exponent = {:.3}  residual {:.2e}  ({:.1?})",
        fit.critical_value,
        fit.amplitude,
        fit.exponent,
        fit.residual,
        t.elapsed()
    );
    Ok(())
}
