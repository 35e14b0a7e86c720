//! Error type shared by every module.

use crate::operator::{Operator, C64};
use thiserror::Error;

/// Failure modes of the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {0}: must be at least 2")]
    InvalidDimension(usize),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("operator contains non-finite entries")]
    NonFinite,

    #[error("size {size} exceeds the limit {limit}: {hint}")]
    TooLarge {
        size: usize,
        limit: usize,
        hint: &'static str,
    },

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error(
        "eigensolver did not converge: {converged}/{wanted} pairs after {restarts} restarts, \
         worst estimate {worst:.3e}"
    )]
    NoConvergence {
        wanted: usize,
        converged: usize,
        restarts: usize,
        worst: f64,
    },

    #[error("kernel is degenerate ({} zero modes); decompose by symmetry first", basis.len())]
    DegenerateKernel { basis: Vec<Operator> },

    #[error("split undefined: {0}")]
    SplitUndefined(String),

    #[error("eigenvalue {0} is complex; build Hermitian combinations with hermitize")]
    ComplexEigenvalue(C64),

    #[error("pairing error: {0}")]
    Pairing(String),

    #[error("symmetry error: {0}")]
    Symmetry(String),

    #[error("incomplete kernel: {0}")]
    IncompleteKernel(String),

    #[error("ill-conditioned result: {0}")]
    Conditioning(String),

    #[error("spectral decomposition unavailable: {0}")]
    DecompositionUnavailable(String),

    #[error("negative evolution time {0}")]
    NegativeTime(f64),

    #[error("not at the Jordan point: omega = {omega}, gamma = {gamma}")]
    NotJordanPoint { omega: f64, gamma: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("observable is not Hermitian (deviation {0:.3e})")]
    NonHermitian(f64),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("fit failed: {message}")]
    Fit { message: String, trace: Vec<String> },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
