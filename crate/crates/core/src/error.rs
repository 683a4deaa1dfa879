use thiserror::Error;

use crate::d2d::StationaryLaw;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("factor conditions on `{0}`, which no earlier factor produces")]
    DanglingInput(String),

    #[error("variable `{0}` appears more than once")]
    DuplicateVar(String),

    #[error("unknown variable `{0}`")]
    UnknownVar(String),

    #[error("variable sets overlap on `{0}`")]
    OverlappingSets(String),

    #[error("cardinality mismatch: {0}")]
    CardinalityMismatch(String),

    #[error("normalization error: {0}")]
    Normalization(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("joint is missing required variable `{0}`")]
    MissingVar(String),

    #[error("joint does not factorize as required (total variation {0:.3e})")]
    FactorizationViolation(f64),

    #[error("compression kernel conditions on forbidden variable `{0}`")]
    MarkovViolation(String),

    #[error("fixed-point iteration did not converge: residual {residual:.3e} after {} iterations", trace.len())]
    NonConvergence { residual: f64, trace: Vec<f64> },

    #[error("a second initialization converged to a different law (total variation {distance:.3e})")]
    AmbiguousFixedPoint {
        law: Box<StationaryLaw>,
        distance: f64,
    },

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of a numerical fixed-point solver rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. } | Error::AmbiguousFixedPoint { .. }
        )
    }
}
