//! Exceptional point of the two-level model.
//!
//! At `ω = γ` the two middle eigenvalues of the Liouvillian coalesce and the Liouvillian
//! is not diagonalizable. The dynamics then contains `t·e^{λt}` terms, compared here with
//! the closed-form expectation values.
//!
//! ```text
//! cargo run --release --example two_level_jordan -- 0.5
//! ```

use liouvillian::dynamics::jordan_decay_check;
use liouvillian::liouville::build_liouvillian;
use liouvillian::models::two_level_model;
use liouvillian::operator::C64;
use liouvillian::spectra::{detect_jordan, full_spectrum};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let eps: f64 = std::env::args().nth(1).map(|a| a.parse()).transpose()?.unwrap_or(0.5);
    let gamma = 1.0;
    println!("omega   eigenvalues");
    for omega in [0.5, 0.9, 0.99, 1.0, 1.01, 1.1, 1.5] {
        let l = build_liouvillian(&two_level_model(omega, eps, gamma)?)?;
        let vals: Vec<String> = full_spectrum(&l)?
            .values()
            .iter()
            .map(|v| format!("{:+.4}{:+.4}i", v.re, v.im))
            .collect();
        println!("{omega:<6}  {}", vals.join("  "));
    }
    let lambda = C64::new(-gamma - eps / 2.0, 0.0);
    let l = build_liouvillian(&two_level_model(gamma, eps, gamma)?)?;
    let rep = detect_jordan(&l, lambda, 1e-8)?;
    println!(
        "at omega = gamma, lambda = {:.3}: algebraic {}, geometric {}",
        lambda.re, rep.algebraic, rep.geometric
    );
    let times: Vec<f64> = (0..=10).map(|k| k as f64).collect();
    let track = jordan_decay_check(gamma, eps, gamma, C64::new(0.25, 0.25), &times)?;
    println!("t     <sx>          closed form   <sz>");
    for (i, t) in track.times.iter().enumerate() {
        println!(
            "{t:<4}  {:+.6e}  {:+.6e}  {:+.6e}",
            track.sx[i], track.sx_closed[i], track.sz[i]
        );
    }
    println!("max relative error {:.2e}", track.max_rel_error);
    Ok(())
}
