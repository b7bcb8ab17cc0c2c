//! Error type shared across the library.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid bounds: {0}")]
    InvalidBounds(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite fitness value {value} for particle {particle}")]
    NonFiniteFitness { particle: usize, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("constriction requires phi + eta > 4, got {sum}")]
    ConstrictionDomain { sum: f64 },

    #[error("posterior history is empty")]
    EmptyHistory,

    #[error("singular matrix in {0}")]
    SingularMatrix(&'static str),

    #[error("the {0} kernel has no pointwise evaluation; it is only usable with kernel-standard")]
    UnsupportedKernel(&'static str),

    #[error("unknown algorithm id `{0}`")]
    UnknownAlgorithm(String),

    #[error("unknown objective id `{0}`")]
    UnknownObjective(String),

    #[error("unknown kernel id `{0}`")]
    UnknownKernel(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed results file: {0}")]
    MalformedResults(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
