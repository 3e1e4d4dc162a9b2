use thiserror::Error;

use crate::tvgrid::SolveResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The Gram system is too ill-conditioned to be trusted.
    #[error("Gram matrix condition number {condition:.3e} exceeds {limit:.1e}")]
    Conditioning { condition: f64, limit: f64 },

    /// Local maxima of |f_v| are not resolved by the scan grid.
    #[error("feasibility scan grid too coarse near r = {radius} (second difference {second_difference:.3e})")]
    GridTooCoarse { radius: f64, second_difference: f64 },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("invalid curve segment: {0}")]
    InvalidSegment(String),

    #[error("invalid grid dimensions: {0}")]
    InvalidDims(String),

    /// The TV solver hit its iteration cap; the last iterate is attached.
    #[error("solver did not converge: normalized gap {gap:.3e} after {iterations} iterations")]
    NotConverged {
        gap: f64,
        iterations: usize,
        last: Option<Box<SolveResult>>,
    },

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn dims(expected: impl ToString, found: impl ToString) -> Self {
        Error::DimensionMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
