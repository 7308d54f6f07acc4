use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller broke an operation contract (index order, parity/degree mismatch, ...).
    #[error("usage error: {0}")]
    Usage(String),

    /// Input that the operation cannot work with (empty vectors, zero leading coefficients).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A parameter or abscissa outside the admissible domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The principal-value quadrature did not settle within its refinement budget.
    #[error("quadrature failed at x = {x}: last two estimates {previous:e} and {last:e}")]
    Quadrature { x: f64, previous: f64, last: f64 },

    /// The dense eigensolver or the root polish did not converge.
    #[error("eigensolver failed for degree {degree} at {precision_bits} bits: {reason}")]
    Numerical {
        degree: usize,
        precision_bits: u32,
        reason: String,
    },

    /// Fewer real solutions than the requested rank.
    #[error("rank {requested} unavailable: only {available} real solution(s) found")]
    RankUnavailable { requested: usize, available: usize },

    /// No reference row for the requested key.
    #[error("no reference entry for {key}; available: {available}")]
    MissingReference { key: String, available: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
