//! Spontaneous breaking of the Z₂ parity symmetry in the two-photon driven Kerr resonator.
//!
//! The Liouvillian is split into even and odd parity sectors. In the broken phase the
//! slowest mode lives in the odd sector, its split `ρ̂₁±` are exchanged by parity and the
//! steady state is their equal mixture.
//!
//! ```text
//! cargo run --release --example two_photon_symmetry_breaking -- 10 -10 20 30 2
//! ```

use liouvillian::analysis::{analyze, expectation, fidelity, ScanOptions};
use liouvillian::liouville::build_liouvillian;
use liouvillian::models::{tail_population, two_photon_thermo};
use liouvillian::operator::hs_norm;
use liouvillian::symmetry::{number_parity_symmetry, symmetry_defect};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .map(|a| a.parse())
        .collect::<Result<_, _>>()?;
    let n = args.first().copied().unwrap_or(10.0);
    let delta = args.get(1).copied().unwrap_or(-10.0);
    let (lo, hi, step) = match args.get(2..5) {
        Some(r) => (r[0], r[1], r[2]),
        None => (2.0, 30.0, 2.0),
    };
    let cutoff = (6.0 * n).ceil().max(30.0) as usize;
    let opts = ScanOptions {
        k: 4,
        symmetry_order: Some(2),
        ..ScanOptions::default()
    };
    let parity = number_parity_symmetry(cutoff, 2)?;
    println!("G      dens    λ1 (sector)                 λ2 even                1-f       |Z2ρ+ - ρ-|  tail");
    let mut g = lo;
    while g <= hi + 1e-9 {
        let model = two_photon_thermo(delta, 10.0, g, 1.0, 1.0, n, cutoff)?;
        let l = build_liouvillian(&model)?;
        let defect = symmetry_defect(&l, &parity, 4, 42)?;
        let a = analyze(&model, &opts)?;
        let dens = expectation(&a.steady, &model.number_operator())? / n;
        let even = a.slowest_in_sector(0).map(|p| p.value).unwrap_or_default();
        let (one_minus_f, swap) = match &a.split {
            Some(s) => (
                1.0 - fidelity(&a.steady, &s.mixture())?,
                hs_norm(&parity.apply(&s.plus)?.sub(&s.minus)?),
            ),
            None => (f64::NAN, f64::NAN),
        };
        println!(
            "{g:5.1}  {dens:.3}  {:+.3e}{:+.1e}i ({})   {:+.3e}{:+.1e}i   {one_minus_f:.1e}   {swap:.1e}      {:.0e}  [L,Z2] {defect:.0e}",
            a.lambda1.value.re,
            a.lambda1.value.im,
            a.lambda1_sector,
            even.re,
            even.im,
            tail_population(&a.steady),
        );
        g += step;
    }
    Ok(())
}
