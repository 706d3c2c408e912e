use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate triple at vertex {index}")]
    DegenerateTriple { index: usize },

    #[error("invalid arc: {0}")]
    InvalidArc(String),

    #[error("invalid polyline: {0}")]
    InvalidPolyline(String),

    #[error("underresolved: {got} vertices, need at least {need}")]
    Underresolved { got: usize, need: usize },

    #[error("resample budget exceeded: {needed} points needed, budget {budget}")]
    BudgetExceeded { needed: usize, budget: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("resolution collapse at t = {t:.17e} (step {step}): {reason}")]
    ResolutionCollapse { t: f64, step: u64, reason: String },

    #[error("non-convex or non-monotone input at indices {indices:?}: {reason}")]
    Rejected { indices: Vec<usize>, reason: String },

    #[error("time {t} is not before the vanishing time estimate {t_hat}")]
    PastVanishingTime { t: f64, t_hat: f64 },

    #[error("zero extent: {0}")]
    ZeroExtent(&'static str),

    #[error("malformed trace at line {line}: {reason}")]
    MalformedTrace { line: usize, reason: String },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
