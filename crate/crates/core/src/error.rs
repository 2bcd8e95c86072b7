use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid reservation scheme: {0}")]
    InvalidScheme(String),

    #[error("invalid reservation problem: {0}")]
    InvalidProblem(String),

    #[error("period {period} out of range 1..={periods}")]
    PeriodOutOfRange { period: usize, periods: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("table is not additive: {0}")]
    NotAdditive(String),

    #[error("block length {k} is not a common multiple of the scheme denominators (minimal valid block length is {minimal})")]
    BlockLength { k: usize, minimal: usize },

    #[error("roster exhausted: position {position} requested but only {length} positions available")]
    RosterExhausted { position: usize, length: usize },

    #[error("unknown category {0:?}")]
    UnknownCategory(String),

    #[error("invalid roster: {0}")]
    InvalidRoster(String),

    #[error("degenerate cycle: {0}")]
    DegenerateCycle(String),

    #[error("contract violation: {0}")]
    Contract(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
