use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("infeasible budget target: {0}")]
    Infeasible(String),

    #[error("invalid trade-off curve: {0}")]
    Validation(String),

    #[error("degenerate trade-off curve: {0}")]
    DegenerateCurve(String),

    #[error(
        "solver did not converge after {iterations} iterations (gradient norm {gradient_norm:e})"
    )]
    Convergence {
        iterations: usize,
        gradient_norm: f64,
    },

    #[error("invalid data: {0}")]
    Data(String),

    #[error("too few replicates: B = {replicates} < 1/alpha = {minimum:.1}")]
    TooFewReplicates { replicates: usize, minimum: f64 },

    #[error("ingestion of {path} failed: {reason}")]
    Ingest { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Error {
    Error::Parameter {
        name,
        reason: reason.into(),
    }
}
