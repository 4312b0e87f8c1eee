use crate::model::ValidationReport;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("scenario violates its assumptions: {0}")]
    InvalidScenario(ValidationReport),
    #[error("invalid commitment: {0}")]
    InvalidCommitment(String),
    #[error("unreachable signal pair ({0}, {1})")]
    UnreachableSignal(String, String),
    #[error("signal `{0}` has zero probability")]
    ZeroProbabilitySignal(String),
    #[error("permutation is not a bijection on {0} signals")]
    NotBijective(usize),
    #[error("grid contains no commitment: {0}")]
    EmptyGrid(String),
    #[error("grid too large: {points} points exceed the limit of {limit}")]
    GridTooLarge { points: u128, limit: u128 },
    #[error(transparent)]
    Parse(#[from] crate::numerics::ParseRationalError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
