//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid angular-momentum arguments: {0}")]
    Angular(String),

    #[error("invalid molecular specification: {0}")]
    Molecule(String),

    #[error("symmetry classification failed for (J={j}, tau={tau}): {reason}")]
    Classification { j: i32, tau: i32, reason: String },

    #[error("config error in `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("kick ODE norm drift {drift:.3e} exceeds 1e-10; raise the step count")]
    NormDrift { drift: f64 },

    #[error("kick generator couples para and ortho sectors (leakage {leak:.3e})")]
    IsomerLeakage { leak: f64 },

    #[error("trace not converged at J_max cap {cap} (tol {tol:.1e})")]
    NonConvergence { cap: i32, tol: f64 },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code contract: 2 for parse/config errors, 3 for numeric
    /// failures, 4 for i/o failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Angular(_)
            | Error::Molecule(_)
            | Error::Config { .. }
            | Error::Parse(_) => 2,
            Error::Classification { .. }
            | Error::NormDrift { .. }
            | Error::IsomerLeakage { .. }
            | Error::NonConvergence { .. } => 3,
            Error::Io { .. } => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
