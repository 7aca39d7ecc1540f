use std::path::PathBuf;

use thiserror::Error;
use toda_core::TodaError;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Toda(#[from] TodaError),

    #[error("benchmark matrix has no {0}")]
    EmptyAxis(&'static str),

    #[error("convergence study needs at least 3 strictly decreasing time steps, got {0:?}")]
    BadStepSequence(Vec<f64>),

    #[error("cannot fit an order: error at dt = {dt} is {error}")]
    NoErrorSignal { dt: f64, error: f64 },

    #[error("reference {path} does not cover region [{lo}, {hi}]")]
    ReferenceCoverage { path: PathBuf, lo: i64, hi: i64 },

    #[error("failed to build thread pool: {0}")]
    ThreadPool(String),

    #[error("I/O error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, BenchError>;
