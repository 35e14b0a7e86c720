//! Builders for the Kerr resonator, the two-photon driven Kerr resonator and the
//! two-level model with competing decay channels.
//!
//! The thermodynamic builders rescale `U = Ũ/N`, `F = F̃√N` and `η = η̃/N`.
//! Rates enter the master equation as `(γ/2)·D[Γ]ρ` with
//! `D[Γ]ρ = 2ΓρΓ† − Γ†Γρ − ρΓ†Γ`.

use crate::error::{Error, Result};
use crate::operator::{destroy, hs_norm, number, Operator, C64};
use serde::{Deserialize, Serialize};

/// A dissipation channel `(Γ, rate)`.
#[derive(Clone, Debug)]
pub struct Jump {
    pub op: Operator,
    pub rate: f64,
}

/// Hamiltonian plus dissipation channels on a common Hilbert space.
#[derive(Clone, Debug)]
pub struct ModelSpec {
    pub hamiltonian: Operator,
    pub jumps: Vec<Jump>,
    pub dim: usize,
    pub meta: ModelMeta,
}

/// Parameter record attached to a built model.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ModelMeta {
    pub params: Option<ModelParams>,
    /// Thermodynamic scaling parameter (1 for unscaled models).
    pub n: f64,
    /// Reference single-photon loss rate used to scale tolerances.
    pub gamma: f64,
}

/// Declarative model description, as read from configuration files.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelParams {
    Kerr {
        delta: f64,
        u: f64,
        f: f64,
        gamma: f64,
        cutoff: usize,
    },
    KerrThermo {
        delta: f64,
        u_tilde: f64,
        f_tilde: f64,
        gamma: f64,
        n: f64,
        #[serde(default)]
        cutoff: Option<usize>,
    },
    TwoPhoton {
        delta: f64,
        u: f64,
        g: f64,
        gamma: f64,
        rate_eta: f64,
        cutoff: usize,
    },
    TwoPhotonThermo {
        delta: f64,
        u_tilde: f64,
        g: f64,
        gamma: f64,
        rate_eta_tilde: f64,
        n: f64,
        #[serde(default)]
        cutoff: Option<usize>,
    },
    TwoLevel {
        omega: f64,
        epsilon: f64,
        gamma: f64,
    },
}

/// Default Fock cutoff for Kerr-family models at scaling parameter `n`.
pub fn default_cutoff(n: f64) -> usize {
    20usize.max((8.0 * n).ceil() as usize)
}

/// Population of the top two Fock levels of `rho`.
pub fn tail_population(rho: &Operator) -> f64 {
    let d = rho.dim();
    (d.saturating_sub(2)..d).map(|i| rho.get(i, i).re.abs()).sum()
}

/// Threshold on [`tail_population`] for an accepted cutoff.
pub const TAIL_TOLERANCE: f64 = 1e-8;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn check_rate(name: &str, v: f64, strict: bool) -> Result<()> {
    if !v.is_finite() || v < 0.0 || (strict && v == 0.0) {
        let bound = if strict { "> 0" } else { ">= 0" };
        return Err(Error::Parameter(format!("{name} must be {bound}, got {v}")));
    }
    Ok(())
}

fn check_finite(pairs: &[(&str, f64)]) -> Result<()> {
    for (name, v) in pairs {
        if !v.is_finite() {
            return Err(Error::Parameter(format!("{name} must be finite, got {v}")));
        }
    }
    Ok(())
}

fn check_cutoff(cutoff: usize) -> Result<()> {
    if cutoff < 2 {
        return Err(Error::Parameter(format!("cutoff must be >= 2, got {cutoff}")));
    }
    Ok(())
}

impl ModelSpec {
    /// Validates and assembles a model from its parts.
    pub fn new(hamiltonian: Operator, jumps: Vec<Jump>, meta: ModelMeta) -> Result<Self> {
        let dim = hamiltonian.dim();
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        let defect = hamiltonian.hermiticity_defect();
        if defect > 1e-12 * hs_norm(&hamiltonian).max(1.0) {
            return Err(Error::Parameter(format!(
                "Hamiltonian is not Hermitian (defect {defect:.3e})"
            )));
        }
        for (k, j) in jumps.iter().enumerate() {
            check_rate(&format!("rate of jump {k}"), j.rate, false)?;
            if j.op.dim() != dim {
                return Err(Error::Shape(format!(
                    "jump {k} has dimension {}, Hamiltonian {dim}",
                    j.op.dim()
                )));
            }
        }
        Ok(ModelSpec {
            hamiltonian,
            jumps,
            dim,
            meta,
        })
    }

    /// `a†a` on the model's Hilbert space.
    pub fn number_operator(&self) -> Operator {
        number(self.dim).expect("dim >= 2")
    }
}

fn kerr_hamiltonian(delta: f64, u: f64, cutoff: usize) -> Result<(Operator, Operator)> {
    let a = destroy(cutoff)?;
    let kerr: Vec<f64> = (0..cutoff)
        .map(|n| {
            let n = n as f64;
            -delta * n + 0.5 * u * n * (n - 1.0)
        })
        .collect();
    Ok((Operator::real_diag(&kerr), a))
}

/// Kerr resonator `H = −Δa†a + (U/2)a†a†aa + F(a† + a)` with loss `(a, γ)`.
pub fn kerr_model(delta: f64, u: f64, f: f64, gamma: f64, cutoff: usize) -> Result<ModelSpec> {
    check_finite(&[("delta", delta), ("u", u), ("f", f)])?;
    check_rate("gamma", gamma, true)?;
    check_cutoff(cutoff)?;
    let (h0, a) = kerr_hamiltonian(delta, u, cutoff)?;
    let drive = a.adjoint().add(&a)?.scale_real(f);
    let h = h0.add(&drive)?;
    ModelSpec::new(
        h,
        vec![Jump { op: a, rate: gamma }],
        ModelMeta {
            params: Some(ModelParams::Kerr {
                delta,
                u,
                f,
                gamma,
                cutoff,
            }),
            n: 1.0,
            gamma,
        },
    )
}

/// Kerr resonator with `U = Ũ/N`, `F = F̃√N`.
pub fn kerr_thermo(
    delta: f64,
    u_tilde: f64,
    f_tilde: f64,
    gamma: f64,
    n: f64,
    cutoff: usize,
) -> Result<ModelSpec> {
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::Parameter(format!("N must be > 0, got {n}")));
    }
    let mut m = kerr_model(delta, u_tilde / n, f_tilde * n.sqrt(), gamma, cutoff)?;
    m.meta.n = n;
    m.meta.params = Some(ModelParams::KerrThermo {
        delta,
        u_tilde,
        f_tilde,
        gamma,
        n,
        cutoff: Some(cutoff),
    });
    Ok(m)
}

/// Two-photon driven Kerr resonator
/// `H = −Δa†a + (U/2)a†a†aa + (G/2)(a†a† + aa)` with channels `(a, γ)` and `(a², η)`.
pub fn two_photon_model(
    delta: f64,
    u: f64,
    g: f64,
    gamma: f64,
    rate_eta: f64,
    cutoff: usize,
) -> Result<ModelSpec> {
    check_finite(&[("delta", delta), ("u", u), ("g", g)])?;
    check_rate("gamma", gamma, true)?;
    check_rate("rate_eta", rate_eta, false)?;
    check_cutoff(cutoff)?;
    let (h0, a) = kerr_hamiltonian(delta, u, cutoff)?;
    let a2 = a.matmul(&a)?;
    let drive = a2.adjoint().add(&a2)?.scale_real(0.5 * g);
    let h = h0.add(&drive)?;
    ModelSpec::new(
        h,
        vec![
            Jump { op: a, rate: gamma },
            Jump {
                op: a2,
                rate: rate_eta,
            },
        ],
        ModelMeta {
            params: Some(ModelParams::TwoPhoton {
                delta,
                u,
                g,
                gamma,
                rate_eta,
                cutoff,
            }),
            n: 1.0,
            gamma,
        },
    )
}

/// Two-photon Kerr resonator with `U = Ũ/N`, `η = η̃/N`.
pub fn two_photon_thermo(
    delta: f64,
    u_tilde: f64,
    g: f64,
    gamma: f64,
    rate_eta_tilde: f64,
    n: f64,
    cutoff: usize,
) -> Result<ModelSpec> {
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::Parameter(format!("N must be > 0, got {n}")));
    }
    let mut m = two_photon_model(delta, u_tilde / n, g, gamma, rate_eta_tilde / n, cutoff)?;
    m.meta.n = n;
    m.meta.params = Some(ModelParams::TwoPhotonThermo {
        delta,
        u_tilde,
        g,
        gamma,
        rate_eta_tilde,
        n,
        cutoff: Some(cutoff),
    });
    Ok(m)
}

/// Two-level system `H = (ω/2)σᶻ` with channels `(σ⁻, ε)` and `(σˣ, γ)`.
///
/// The basis is ordered so that `σᶻ = diag(1, −1)`.
pub fn two_level_model(omega: f64, epsilon: f64, gamma: f64) -> Result<ModelSpec> {
    check_finite(&[("omega", omega)])?;
    check_rate("gamma", gamma, true)?;
    check_rate("epsilon", epsilon, false)?;
    let h = Operator::real_diag(&[0.5 * omega, -0.5 * omega]);
    let sm = Operator::from_triplets(2, &[(1, 0, c(1.0))])?;
    let sx = Operator::from_triplets(2, &[(0, 1, c(1.0)), (1, 0, c(1.0))])?;
    ModelSpec::new(
        h,
        vec![
            Jump {
                op: sm,
                rate: epsilon,
            },
            Jump { op: sx, rate: gamma },
        ],
        ModelMeta {
            params: Some(ModelParams::TwoLevel {
                omega,
                epsilon,
                gamma,
            }),
            n: 1.0,
            gamma,
        },
    )
}

/// Pauli matrices `(σˣ, σʸ, σᶻ)` in the basis of [`two_level_model`].
pub fn pauli() -> (Operator, Operator, Operator) {
    let sx = Operator::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
    let sy = Operator::from_rows(&[
        &[C64::new(0.0, 0.0), C64::new(0.0, -1.0)],
        &[C64::new(0.0, 1.0), C64::new(0.0, 0.0)],
    ])
    .unwrap();
    let sz = Operator::real_diag(&[1.0, -1.0]);
    (sx, sy, sz)
}

impl ModelParams {
    /// Builds the model, resolving an unset cutoff with [`default_cutoff`].
    pub fn build(&self) -> Result<ModelSpec> {
        match *self {
            ModelParams::Kerr {
                delta,
                u,
                f,
                gamma,
                cutoff,
            } => kerr_model(delta, u, f, gamma, cutoff),
            ModelParams::KerrThermo {
                delta,
                u_tilde,
                f_tilde,
                gamma,
                n,
                cutoff,
            } => kerr_thermo(
                delta,
                u_tilde,
                f_tilde,
                gamma,
                n,
                cutoff.unwrap_or_else(|| default_cutoff(n)),
            ),
            ModelParams::TwoPhoton {
                delta,
                u,
                g,
                gamma,
                rate_eta,
                cutoff,
            } => two_photon_model(delta, u, g, gamma, rate_eta, cutoff),
            ModelParams::TwoPhotonThermo {
                delta,
                u_tilde,
                g,
                gamma,
                rate_eta_tilde,
                n,
                cutoff,
            } => two_photon_thermo(
                delta,
                u_tilde,
                g,
                gamma,
                rate_eta_tilde,
                n,
                cutoff.unwrap_or_else(|| default_cutoff(n)),
            ),
            ModelParams::TwoLevel {
                omega,
                epsilon,
                gamma,
            } => two_level_model(omega, epsilon, gamma),
        }
    }

    /// Reference loss rate `γ`.
    pub fn gamma(&self) -> f64 {
        match *self {
            ModelParams::Kerr { gamma, .. }
            | ModelParams::KerrThermo { gamma, .. }
            | ModelParams::TwoPhoton { gamma, .. }
            | ModelParams::TwoPhotonThermo { gamma, .. }
            | ModelParams::TwoLevel { gamma, .. } => gamma,
        }
    }

    /// Thermodynamic parameter, 1 for unscaled models.
    pub fn n(&self) -> f64 {
        match *self {
            ModelParams::KerrThermo { n, .. } | ModelParams::TwoPhotonThermo { n, .. } => n,
            _ => 1.0,
        }
    }

    /// Current cutoff, `None` for an unresolved automatic cutoff.
    pub fn cutoff(&self) -> Option<usize> {
        match *self {
            ModelParams::Kerr { cutoff, .. } | ModelParams::TwoPhoton { cutoff, .. } => {
                Some(cutoff)
            }
            ModelParams::KerrThermo { cutoff, .. }
            | ModelParams::TwoPhotonThermo { cutoff, .. } => cutoff,
            ModelParams::TwoLevel { .. } => Some(2),
        }
    }

    /// True for models with a bosonic mode and a Fock cutoff.
    pub fn is_bosonic(&self) -> bool {
        !matches!(self, ModelParams::TwoLevel { .. })
    }

    /// Copy with a different cutoff. Ignored for the two-level model.
    pub fn with_cutoff(&self, new: usize) -> Self {
        let mut p = self.clone();
        match &mut p {
            ModelParams::Kerr { cutoff, .. } | ModelParams::TwoPhoton { cutoff, .. } => {
                *cutoff = new
            }
            ModelParams::KerrThermo { cutoff, .. }
            | ModelParams::TwoPhotonThermo { cutoff, .. } => *cutoff = Some(new),
            ModelParams::TwoLevel { .. } => {}
        }
        p
    }

    /// Copy with the named parameter set to `value`.
    ///
    /// Names follow the serialized field names (`f_tilde`, `g`, `omega`, `n`, ...).
    pub fn with_parameter(&self, name: &str, value: f64) -> Result<Self> {
        let mut p = self.clone();
        let slot: Option<&mut f64> = match (&mut p, name) {
            (ModelParams::Kerr { delta, .. }, "delta")
            | (ModelParams::KerrThermo { delta, .. }, "delta")
            | (ModelParams::TwoPhoton { delta, .. }, "delta")
            | (ModelParams::TwoPhotonThermo { delta, .. }, "delta") => Some(delta),
            (ModelParams::Kerr { u, .. }, "u") | (ModelParams::TwoPhoton { u, .. }, "u") => {
                Some(u)
            }
            (ModelParams::Kerr { f, .. }, "f") => Some(f),
            (ModelParams::KerrThermo { u_tilde, .. }, "u_tilde")
            | (ModelParams::TwoPhotonThermo { u_tilde, .. }, "u_tilde") => Some(u_tilde),
            (ModelParams::KerrThermo { f_tilde, .. }, "f_tilde") => Some(f_tilde),
            (ModelParams::TwoPhoton { g, .. }, "g")
            | (ModelParams::TwoPhotonThermo { g, .. }, "g") => Some(g),
            (ModelParams::TwoPhoton { rate_eta, .. }, "rate_eta") => Some(rate_eta),
            (ModelParams::TwoPhotonThermo { rate_eta_tilde, .. }, "rate_eta_tilde") => {
                Some(rate_eta_tilde)
            }
            (ModelParams::KerrThermo { n, .. }, "n")
            | (ModelParams::TwoPhotonThermo { n, .. }, "n") => Some(n),
            (ModelParams::TwoLevel { omega, .. }, "omega") => Some(omega),
            (ModelParams::TwoLevel { epsilon, .. }, "epsilon") => Some(epsilon),
            (ModelParams::Kerr { gamma, .. }, "gamma")
            | (ModelParams::KerrThermo { gamma, .. }, "gamma")
            | (ModelParams::TwoPhoton { gamma, .. }, "gamma")
            | (ModelParams::TwoPhotonThermo { gamma, .. }, "gamma")
            | (ModelParams::TwoLevel { gamma, .. }, "gamma") => Some(gamma),
            _ => None,
        };
        match slot {
            Some(s) => {
                *s = value;
                Ok(p)
            }
            None => Err(Error::Parameter(format!(
                "model has no parameter named '{name}'"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kerr_diagonal_entry() {
        let (delta, u) = (1.3, 0.7);
        let m = kerr_model(delta, u, 0.4, 1.0, 5).unwrap();
        let h22 = m.hamiltonian.get(2, 2);
        assert!((h22 - c(-2.0 * delta + u)).norm() < 1e-14);
        assert!((m.hamiltonian.get(1, 2) - c(0.4 * 2f64.sqrt())).norm() < 1e-14);
        assert_eq!(m.jumps.len(), 1);
        assert_eq!(m.jumps[0].rate, 1.0);
    }

    #[test]
    fn kerr_parameter_errors() {
        assert!(matches!(kerr_model(1.0, 1.0, 1.0, 0.0, 5), Err(Error::Parameter(_))));
        assert!(matches!(kerr_model(1.0, 1.0, 1.0, -1.0, 5), Err(Error::Parameter(_))));
        assert!(matches!(kerr_model(1.0, 1.0, 1.0, 1.0, 1), Err(Error::Parameter(_))));
        assert!(matches!(kerr_thermo(1.0, 1.0, 1.0, 1.0, 0.0, 5), Err(Error::Parameter(_))));
    }

    #[test]
    fn thermo_with_unit_n_matches_plain() {
        let a = kerr_thermo(10.0, 10.0, 2.3, 1.0, 1.0, 8).unwrap();
        let b = kerr_model(10.0, 10.0, 2.3, 1.0, 8).unwrap();
        assert!(hs_norm(&a.hamiltonian.sub(&b.hamiltonian).unwrap()) == 0.0);
        let a = two_photon_thermo(-10.0, 10.0, 3.0, 1.0, 1.0, 1.0, 8).unwrap();
        let b = two_photon_model(-10.0, 10.0, 3.0, 1.0, 1.0, 8).unwrap();
        assert!(hs_norm(&a.hamiltonian.sub(&b.hamiltonian).unwrap()) == 0.0);
        assert_eq!(a.jumps[1].rate, b.jumps[1].rate);
    }

    #[test]
    fn thermo_scaling_identities() {
        let (u_t, f_t, eta_t) = (10.0, 2.2, 1.0);
        for n in [2.0, 5.0, 10.0] {
            let m = kerr_thermo(10.0, u_t, f_t, 1.0, n, 30).unwrap();
            // U from ⟨2|H|2⟩ + 2Δ, F from ⟨0|H|1⟩.
            let u = m.hamiltonian.get(2, 2).re + 2.0 * 10.0;
            let f = m.hamiltonian.get(0, 1).re;
            assert!((u * n - u_t).abs() < 1e-12);
            assert!((f / n.sqrt() - f_t).abs() < 1e-12);
            assert!((u * f * f - u_t * f_t * f_t).abs() < 1e-12);
            assert_eq!(m.meta.n, n);
            let t = two_photon_thermo(-10.0, u_t, 5.0, 1.0, eta_t, n, 10).unwrap();
            assert!((t.jumps[1].rate * n - eta_t).abs() < 1e-14);
        }
    }

    #[test]
    fn two_photon_structure() {
        let m = two_photon_model(-10.0, 1.0, 4.0, 1.0, 0.1, 6).unwrap();
        // ⟨0|H|2⟩ = (G/2)·√2
        assert!((m.hamiltonian.get(0, 2) - c(2.0 * 2f64.sqrt())).norm() < 1e-14);
        assert_eq!(m.hamiltonian.get(0, 1), c(0.0));
        assert!((m.jumps[1].op.get(0, 2) - c(2f64.sqrt())).norm() < 1e-14);
        assert_eq!(m.jumps[1].rate, 0.1);
        assert!(matches!(
            two_photon_model(0.0, 0.0, 0.0, 1.0, -0.1, 6),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn two_level_structure() {
        let m = two_level_model(0.5, 0.25, 1.0).unwrap();
        assert_eq!(m.dim, 2);
        assert_eq!(m.hamiltonian.get(0, 0), c(0.25));
        assert_eq!(m.hamiltonian.get(1, 1), c(-0.25));
        assert_eq!(m.jumps[0].op.get(1, 0), c(1.0));
        assert_eq!(m.jumps[0].rate, 0.25);
        assert_eq!(m.jumps[1].rate, 1.0);
        assert!(matches!(two_level_model(1.0, 0.1, 0.0), Err(Error::Parameter(_))));
        assert!(matches!(two_level_model(1.0, -0.1, 1.0), Err(Error::Parameter(_))));
    }

    #[test]
    fn hamiltonians_are_hermitian() {
        let models = [
            kerr_model(10.0, 1.0, 3.0, 1.0, 12).unwrap(),
            two_photon_model(-10.0, 1.0, 3.0, 1.0, 0.1, 12).unwrap(),
            two_level_model(0.3, 0.2, 1.0).unwrap(),
        ];
        for m in models {
            assert!(m.hamiltonian.hermiticity_defect() <= 1e-12 * hs_norm(&m.hamiltonian));
        }
    }

    #[test]
    fn rejects_non_hermitian_hamiltonian() {
        let h = Operator::from_triplets(2, &[(0, 1, c(1.0))]).unwrap();
        let meta = ModelMeta {
            params: None,
            n: 1.0,
            gamma: 1.0,
        };
        assert!(matches!(ModelSpec::new(h, vec![], meta), Err(Error::Parameter(_))));
    }

    #[test]
    fn cutoff_heuristic() {
        assert_eq!(default_cutoff(1.0), 20);
        assert_eq!(default_cutoff(2.5), 20);
        assert_eq!(default_cutoff(10.0), 80);
        assert_eq!(default_cutoff(15.2), 122);
    }

    #[test]
    fn params_round_trip_through_json() {
        let p = ModelParams::TwoPhotonThermo {
            delta: -10.0,
            u_tilde: 10.0,
            g: 12.0,
            gamma: 1.0,
            rate_eta_tilde: 1.0,
            n: 10.0,
            cutoff: None,
        };
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("\"kind\":\"two_photon_thermo\""));
        let q: ModelParams = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
        assert_eq!(q.build().unwrap().dim, 80);
        let r = q.with_parameter("g", 3.0).unwrap();
        assert!(matches!(r, ModelParams::TwoPhotonThermo { g, .. } if g == 3.0));
        assert!(q.with_parameter("f_tilde", 1.0).is_err());
    }
}
