//! Block-diagonalization of a Liouvillian by a weak `Z_n` symmetry.
//!
//! The undriven Kerr resonator commutes with every phase rotation; here the `Z₃` subgroup
//! splits the Liouville space into three blocks whose spectra merge into the full one.
//!
//! ```text
//! cargo run --release --example sector_decomposition
//! ```

use liouvillian::liouville::build_liouvillian;
use liouvillian::models::{kerr_model, two_photon_model};
use liouvillian::spectra::full_spectrum;
use liouvillian::symmetry::{number_parity_symmetry, sector_decompose, symmetry_defect};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (name, model, order) in [
        ("undriven Kerr, Z3", kerr_model(1.0, 1.0, 0.0, 1.0, 10)?, 3),
        ("two-photon Kerr, Z2", two_photon_model(-2.0, 1.0, 1.5, 1.0, 0.5, 10)?, 2),
    ] {
        let l = build_liouvillian(&model)?;
        let s = number_parity_symmetry(model.dim, order)?;
        println!("{name}: relative defect {:.1e}", symmetry_defect(&l, &s, 4, 1)?);
        let dec = sector_decompose(&l, &s)?;
        let spectra = dec.low_spectra(3)?;
        for (b, (_, spec)) in dec.sectors.iter().zip(&spectra) {
            let vals: Vec<String> = spec
                .values()
                .iter()
                .map(|v| format!("{:+.4}{:+.4}i", v.re, v.im))
                .collect();
            println!(
                "  sector {} (z = {:+.3}{:+.3}i, size {:>3}): {}",
                b.j,
                b.z.re,
                b.z.im,
                b.block.len(),
                vals.join("  ")
            );
        }
        let full = full_spectrum(&l)?;
        println!("  full-space gap {:.6}", full.gap);
        let ss = dec.steady_state()?;
        println!("  steady state from the z = 1 block, trace {:.6}", ss.trace().re);
    }
    Ok(())
}
