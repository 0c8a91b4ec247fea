use crate::target::Factor;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point lies outside the support of the {factor} factor")]
    OutOfSupport { factor: Factor },

    #[error("{factor} factor returned non-finite value {value}")]
    NonFinite { factor: Factor, value: f64 },

    #[error("invalid reference measure: {0}")]
    InvalidReference(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("target has no direct sampler for the coarse superlevel sets")]
    MissingDirectSampler,

    #[error("{routine} exceeded its cap of {cap} iterations")]
    Exhausted { routine: &'static str, cap: usize },

    #[error("series is constant")]
    ConstantSeries,

    #[error("{kernel} failed at iteration {iteration}: {source}")]
    Chain {
        kernel: &'static str,
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid grid size h = {0}: 1/h must be a power of two >= 4")]
    InvalidGridSize(f64),

    #[error("row {row}: {message}")]
    MalformedRow { row: usize, message: String },

    #[error("cost of the delayed-acceptance run is zero")]
    ZeroCost,

    #[error("wall time missing from report")]
    MissingWallTime,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
