//! Exports a Liouvillian in Matrix Market format and its low-lying spectrum as CSV.
//!
//! ```text
//! cargo run --release --example spectrum_export -- /tmp/kerr
//! ```

use liouvillian::liouville::build_liouvillian;
use liouvillian::models::kerr_thermo;
use liouvillian::spectra::low_spectrum;
use std::fs::File;
use std::io::BufWriter;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let stem = std::env::args().nth(1).unwrap_or_else(|| "kerr".into());
    let model = kerr_thermo(10.0, 10.0, 2.25, 1.0, 5.0, 30)?;
    let l = build_liouvillian(&model)?;
    let mtx = format!("{stem}.mtx");
    l.write_matrix_market(BufWriter::new(File::create(&mtx)?))?;
    let spec = low_spectrum(&l, 8)?;
    let csv = format!("{stem}_spectrum.csv");
    let mut w = csv::Writer::from_path(&csv)?;
    w.write_record(["index", "re", "im", "residual"])?;
    for p in &spec.pairs {
        w.write_record([
            p.index.to_string(),
            format!("{:.12e}", p.value.re),
            format!("{:.12e}", p.value.im),
            format!("{:.3e}", p.residual),
        ])?;
    }
    w.flush()?;
    println!("wrote {mtx} ({} x {}) and {csv} ({} eigenvalues)", l.len(), l.len(), spec.pairs.len());
    Ok(())
}
