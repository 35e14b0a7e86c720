//! JSON run configuration.
//!
//! ```json
//! {
//!   "model": { "kind": "kerr_thermo", "delta": 10, "u_tilde": 10, "f_tilde": 2.2, "gamma": 1, "n": 5 },
//!   "solver": { "mode": "shift_invert", "k": 6, "shift": 0.01, "symmetry_order": null,
//!               "tolerances": { "zero_rel": 1e-12, "im": 1e-8, "arnoldi": 1e-13, "bifurcation_im": 1e-6 } },
//!   "scan": { "parameter": "f_tilde", "min": 2.0, "max": 2.7, "steps": 15, "n_list": [5, 10],
//!             "cutoff": { "factor": 6, "offset": 0, "min": 20 } },
//!   "evolve": { "t_max": 10, "samples": 101, "initial": "vacuum" },
//!   "fit": { "points": [[5, 15.3], [8, 13.6], [11, 12.8], [14, 12.3]] },
//!   "output": { "path": "out.csv", "format": "csv" }
//! }
//! ```

use crate::error::{Error, Result};
use crate::models::ModelParams;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::PathBuf;

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum SolverMode {
    /// Dense for small blocks, shift-invert otherwise.
    #[default]
    Auto,
    Dense,
    ShiftInvert,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Zero-eigenvalue threshold relative to `‖L‖₁`.
    pub zero_rel: f64,
    /// `|Im λ|` below which eigenvalues count as real.
    pub im: f64,
    /// Arnoldi Ritz-value tolerance.
    pub arnoldi: f64,
    /// `|Im λ₁|` threshold of the bifurcation detection.
    pub bifurcation_im: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            zero_rel: crate::spectra::ZERO_TOL_REL,
            im: crate::spectra::IM_TOL_REL,
            arnoldi: 1e-13,
            bifurcation_im: 1e-6,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub mode: SolverMode,
    pub k: usize,
    pub shift: f64,
    pub tolerances: Tolerances,
    /// Order of the `exp(2πi a†a/n)` symmetry used to block-diagonalize, if any.
    pub symmetry_order: Option<usize>,
    pub seed: u64,
    pub max_restarts: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            mode: SolverMode::Auto,
            k: 6,
            shift: crate::spectra::DEFAULT_SHIFT,
            tolerances: Tolerances::default(),
            symmetry_order: None,
            seed: 42,
            max_restarts: 500,
        }
    }
}

/// Cutoff rule `max(min, ceil(factor·N + offset))` for rescaled models.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CutoffRule {
    pub factor: f64,
    #[serde(default)]
    pub offset: f64,
    #[serde(default)]
    pub min: usize,
}

impl CutoffRule {
    pub fn cutoff(&self, n: f64) -> usize {
        ((self.factor * n + self.offset).ceil().max(0.0) as usize).max(self.min)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub parameter: String,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    #[serde(default)]
    pub n_list: Option<Vec<f64>>,
    #[serde(default)]
    pub cutoff: Option<CutoffRule>,
}

impl ScanConfig {
    /// `steps` equally spaced values from `min` to `max`.
    pub fn grid(&self) -> Vec<f64> {
        (0..self.steps)
            .map(|i| self.min + (self.max - self.min) * i as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// `|0⟩⟨0|`.
    #[default]
    Vacuum,
    MaximallyMixed,
    /// Seeded random density matrix.
    Random,
    Steady,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    pub t_max: f64,
    pub samples: usize,
    #[serde(default)]
    pub initial: InitialState,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    /// Precomputed `(N, G_B)` pairs; skips the bifurcation search.
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    pub format: OutputFormat,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelParams,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub scan: Option<ScanConfig>,
    #[serde(default)]
    pub evolve: Option<EvolveConfig>,
    #[serde(default)]
    pub fit: Option<FitConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be positive, got {v}")))
    }
}

impl RunConfig {
    /// Parses and validates a JSON document.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.solver.tolerances;
        positive("solver.tolerances.zero_rel", t.zero_rel)?;
        positive("solver.tolerances.im", t.im)?;
        positive("solver.tolerances.arnoldi", t.arnoldi)?;
        positive("solver.tolerances.bifurcation_im", t.bifurcation_im)?;
        if self.solver.k == 0 {
            return Err(Error::Config("solver.k must be at least 1".into()));
        }
        if !self.solver.shift.is_finite() {
            return Err(Error::Config("solver.shift must be finite".into()));
        }
        if let Some(o) = self.solver.symmetry_order {
            if o < 2 {
                return Err(Error::Config("solver.symmetry_order must be at least 2".into()));
            }
        }
        if let Some(s) = &self.scan {
            if s.steps < 2 {
                return Err(Error::Config(format!("scan.steps must be at least 2, got {}", s.steps)));
            }
            if !(s.max > s.min) {
                return Err(Error::Config("scan.max must exceed scan.min".into()));
            }
            self.model
                .with_parameter(&s.parameter, s.min)
                .map_err(|e| Error::Config(format!("scan.parameter: {e}")))?;
            if let Some(ns) = &s.n_list {
                if ns.is_empty() || ns.iter().any(|n| !(*n > 0.0)) {
                    return Err(Error::Config("scan.n_list must hold positive values".into()));
                }
                self.model
                    .with_parameter("n", ns[0])
                    .map_err(|_| Error::Config("scan.n_list needs a rescaled (thermo) model".into()))?;
            }
            if let Some(c) = &s.cutoff {
                positive("scan.cutoff.factor", c.factor)?;
            }
        }
        if let Some(e) = &self.evolve {
            positive("evolve.t_max", e.t_max)?;
            if e.samples < 2 {
                return Err(Error::Config("evolve.samples must be at least 2".into()));
            }
        }
        self.model
            .build()
            .map_err(|e| Error::Config(format!("model: {e}")))?;
        Ok(())
    }

    /// Model at scaling parameter `n` (if given), with the scan cutoff rule applied.
    pub fn model_at(&self, n: Option<f64>) -> Result<ModelParams> {
        let mut p = self.model.clone();
        if let Some(n) = n {
            p = p.with_parameter("n", n)?;
        }
        if let Some(rule) = self.scan.as_ref().and_then(|s| s.cutoff.as_ref()) {
            if p.is_bosonic() {
                p = p.with_cutoff(rule.cutoff(p.n()));
            }
        }
        Ok(p)
    }
}

/// Hex SHA-256 of the raw configuration text.
pub fn config_hash(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
