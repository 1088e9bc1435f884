use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vector has {actual} coordinates, space `{space}` has {expected} dimensions")]
    DimensionMismatch {
        space: String,
        expected: usize,
        actual: usize,
    },

    #[error("parameter `{name}`: {reason}")]
    InvalidValue { name: String, reason: String },

    #[error("configuration belongs to space `{found}`, expected `{expected}`")]
    SpaceMismatch { expected: String, found: String },

    #[error("unknown preset `{name}`; available: {}", available.join(", "))]
    UnknownPreset { name: String, available: Vec<String> },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("goal {node}/{outcome} does not belong to subject `{subject}`")]
    UnknownGoal {
        subject: String,
        node: usize,
        outcome: bool,
    },

    #[error("budget of {budget} evaluations cannot cover a population of {population}")]
    BudgetTooSmall { budget: u64, population: usize },

    #[error("empty sample: {0}")]
    EmptySample(String),

    #[error("{0}")]
    Experiment(String),

    /// Command-line parse failure, already rendered with usage text.
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
