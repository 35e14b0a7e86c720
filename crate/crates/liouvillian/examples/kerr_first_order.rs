//! First-order transition of the driven Kerr resonator.
//!
//! Scans the rescaled drive `F̃/γ` at `Δ/γ = Ũ/γ = 10` and prints the gap, the photon
//! density and the fidelities of the steady state with the split of `ρ̂₁`.
//!
//! ```text
//! cargo run --release --example kerr_first_order -- 10 2.0 2.7 0.05
//! ```

use liouvillian::analysis::{scan_params, ScanOptions};
use liouvillian::models::ModelParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .map(|a| a.parse())
        .collect::<Result<_, _>>()?;
    let n = args.first().copied().unwrap_or(5.0);
    let (lo, hi, step) = match args.get(1..4) {
        Some(r) => (r[0], r[1], r[2]),
        None => (2.0, 2.7, 0.05),
    };
    let cutoff = (6.0 * n).ceil().max(20.0) as usize;
    let base = ModelParams::KerrThermo {
        delta: 10.0,
        u_tilde: 10.0,
        f_tilde: lo,
        gamma: 1.0,
        n,
        cutoff: Some(cutoff),
    };
    let steps = ((hi - lo) / step).round() as usize;
    let grid: Vec<f64> = (0..=steps).map(|i| lo + step * i as f64).collect();
    let t = std::time::Instant::now();
    let recs = scan_params(&base, "f_tilde", &grid, &ScanOptions::default())?;
    println!("F/γ      density  gap        Im λ1      1-f        f+     f-     status");
    for r in &recs {
        println!(
            "{:.3}   {:.4}   {:.3e}  {:+.1e}  {:.2e}  {:.3}  {:.3}  {}",
            r.zeta, r.density, r.gap, r.im_lambda1, r.one_minus_f, r.f_plus, r.f_minus, r.status
        );
    }
    let min = recs
        .iter()
        .filter(|r| r.gap.is_finite())
        .min_by(|a, b| a.gap.total_cmp(&b.gap))
        .ok_or("no successful grid point")?;
    println!(
        "N = {n}, cutoff {cutoff}: gap minimum {:.3e} at F/γ = {:.3} ({:.1?})",
        min.gap,
        min.zeta,
        t.elapsed()
    );
    Ok(())
}
