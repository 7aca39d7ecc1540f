use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, TodaError>;

#[derive(Debug, Error)]
pub enum TodaError {
    #[error("invalid index window [{k_min}, {k_max}]")]
    InvalidWindow { k_min: i64, k_max: i64 },

    #[error("sequence length {got} does not match window length {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite value at lattice site {site}")]
    NonFinite { site: i64 },

    #[error("off-diagonal entry a_{site} = {value} is not positive")]
    NonPositiveOffDiagonal { site: i64, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("integration diverged at step {step} (t = {time})")]
    Diverged { step: usize, time: f64 },

    #[error("empty input vector")]
    EmptyInput,

    #[error("degenerate reference: sorted norm of the reference minus its background is zero")]
    DegenerateReference,

    #[error("no soliton peak found ahead of the dispersive cone")]
    NoSolitonPeak,

    #[error("eigenvalue {0} lies inside the continuous spectrum [-1, 1]")]
    InsideBand(f64),

    #[error("fine reference not converged: step-halved runs differ by {difference:e} (allowed {allowed:e})")]
    ReferenceNotConverged { difference: f64, allowed: f64 },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
