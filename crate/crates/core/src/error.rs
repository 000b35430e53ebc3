use std::path::PathBuf;

use crate::eigensolve::EigenSolution;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("missing spectral data: {0}")]
    MissingData(&'static str),

    #[error("length mismatch for {what}: expected {expected}, got {actual}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("matrix is not symmetric (max |a_ij - a_ji| = {0:e})")]
    NotSymmetric(f64),

    #[error("mass matrix is not positive definite")]
    IndefiniteMass,

    #[error("degenerate triangle {index} (area {area:e})")]
    DegenerateTriangle { index: usize, area: f64 },

    #[error("non-manifold mesh: {0}")]
    NonManifold(String),

    #[error("malformed OFF input at line {line}: {message}")]
    MalformedOff { line: usize, message: String },

    #[error("operator has no unknowns left after Dirichlet elimination")]
    EmptyOperator,

    #[error("dense solver limited to dimension {cap}, got {dim}")]
    DimensionCap { dim: usize, cap: usize },

    #[error(
        "eigensolver did not converge after {} iterations ({} of {} pairs converged)",
        .partial.iterations,
        .partial.converged_count,
        .partial.eigenvalues.len()
    )]
    NotConverged { partial: Box<EigenSolution> },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad user input rather than a failed computation.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidArgument(_)
                | Error::MissingData(_)
                | Error::LengthMismatch { .. }
                | Error::MalformedOff { .. }
                | Error::NonManifold(_)
                | Error::DegenerateTriangle { .. }
                | Error::Io { .. }
                | Error::Json(_)
        )
    }
}
