//! Relaxation of a driven Kerr resonator towards its steady state.
//!
//! The photon number along `e^{Lt} ρ₀` is written as CSV; the trace distance to the
//! steady state decays as `e^{-gap·t}`.
//!
//! ```text
//! cargo run --release --example steady_state_dynamics > kerr_relaxation.csv
//! ```

use liouvillian::analysis::{expectation, trace_distance};
use liouvillian::dynamics::trajectory;
use liouvillian::liouville::build_liouvillian;
use liouvillian::models::kerr_model;
use liouvillian::operator::Operator;
use liouvillian::spectra::{liouvillian_gap, steady_state};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = kerr_model(1.0, 0.5, 1.5, 1.0, 20)?;
    let l = build_liouvillian(&model)?;
    let ss = steady_state(&l)?;
    let num = model.number_operator();
    let (gap, _) = liouvillian_gap(&l)?;
    eprintln!("gap {gap:.4}, steady-state <n> {:.4}", expectation(&ss, &num)?);
    let times: Vec<f64> = (0..=100).map(|k| 0.1 * k as f64).collect();
    let rho0 = Operator::basis(model.dim, 0, 0);
    let tr = trajectory(&l, &rho0, &times, &[("n", &num)])?;
    let last = tr.states.last().ok_or("empty trajectory")?;
    eprintln!(
        "trace distance to the steady state at t = {}: {:.2e}",
        times[times.len() - 1],
        trace_distance(last, &ss)?
    );
    tr.write_csv(std::io::stdout().lock())?;
    Ok(())
}
