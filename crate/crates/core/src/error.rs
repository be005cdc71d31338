use thiserror::Error;

use crate::kernel::BoundaryDetail;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("topology error: {0}")]
    Topology(String),

    #[error("mesh is open, {0} is undefined")]
    OpenMesh(&'static str),

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("perturbation retries exhausted after {attempts} attempts ({detail:?})")]
    RetriesExhausted { attempts: u32, detail: BoundaryDetail },

    #[error("winding query failed: {0} consecutive degenerate rays")]
    DegenerateRays(u32),

    #[error("non-finite velocity at vertex {0}")]
    NonFiniteVelocity(u32),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-parsable category name.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::Topology(_) => "topology",
            Error::OpenMesh(_) => "open-mesh",
            Error::Degenerate(_) => "degenerate",
            Error::RetriesExhausted { .. } => "retries-exhausted",
            Error::DegenerateRays(_) => "degenerate-rays",
            Error::NonFiniteVelocity(_) => "non-finite-velocity",
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::Internal(_) => "internal",
            Error::Io(_) => "io",
        }
    }
}
