use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("trajectory `{0}` has no points")]
    EmptyTrajectory(String),

    #[error("trajectory `{0}` mixes planar and symbolic points")]
    MixedPointKinds(String),

    #[error("trajectory `{id}` has a non-finite coordinate at point {index}")]
    NonFiniteCoordinate { id: String, index: usize },

    #[error("matching sequence has {found} entries, query has {expected} points")]
    LengthMismatch { expected: usize, found: usize },

    #[error("matching sequence decreases at position {position}")]
    NonMonotoneSequence { position: usize },

    #[error("index {index} outside 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("epsilon must be positive, got {0}")]
    NonPositiveEpsilon(f64),

    #[error("operation requires the {expected} family, model `{model}` is {found}")]
    WrongFamily {
        model: String,
        expected: &'static str,
        found: &'static str,
    },

    #[error("operation requires planar points")]
    SymbolicPointsUnsupported,

    #[error("database contains no trajectories")]
    EmptyDatabase,

    #[error("{ranges} subtrajectories exceed the enumeration budget of {budget}")]
    BudgetExceeded { ranges: usize, budget: usize },

    #[error("search result for `{found}` does not belong to ranking of `{expected}`")]
    PairMismatch { expected: String, found: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid model spec `{spec}`: {reason}")]
    InvalidModelSpec { spec: String, reason: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("trajectory `{id}` has seq {seq} after {previous} at line {line}")]
    NonMonotoneSeq {
        id: String,
        seq: i64,
        previous: i64,
        line: usize,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
