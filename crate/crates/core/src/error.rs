use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("coordinate {value} on axis {axis} is outside [0, {x_max}]")]
    OutOfDomain { axis: usize, value: u64, x_max: u32 },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("requested {k} examples from a dataset of size {len}")]
    InvalidCount { k: usize, len: usize },

    #[error("axis {axis} out of range for dimension {d}")]
    InvalidAxis { axis: usize, d: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("interior point solver needs at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("domain size {domain_max} exceeds exact-mode limit {limit}")]
    DomainTooLarge { domain_max: u32, limit: u32 },

    #[error("insufficient data at iteration {iteration}: {remaining} points left, {needed} needed")]
    InsufficientData {
        iteration: usize,
        remaining: usize,
        needed: usize,
    },

    #[error("traces are not paired: {0}")]
    UnpairedTraces(String),

    #[error("strategy emitted q={q}, q_bar={q_bar} at round {round}")]
    InvalidStrategy { round: usize, q: f64, q_bar: f64 },

    #[error("insufficient trials: {got} < {needed}")]
    InsufficientTrials { got: usize, needed: usize },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
