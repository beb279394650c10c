use thiserror::Error;

/// Errors raised across model learning, inference, simulation and the cluster layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty batch")]
    EmptyBatch,

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("unknown state `{state}` for variable `{variable}`")]
    UnknownState { variable: String, state: String },

    #[error("cardinality mismatch for variable `{variable}`: state `{state}` is not in the model")]
    CardinalityMismatch { variable: String, state: String },

    #[error("edge {parent} -> {child} would create a cycle")]
    Cycle { parent: String, child: String },

    #[error("impossible evidence")]
    ImpossibleEvidence,

    #[error("incompatible models: {0}")]
    IncompatibleModels(String),

    #[error("CPT row not normalized: variable `{variable}`, row {row} sums to {sum}")]
    NotNormalized {
        variable: String,
        row: usize,
        sum: f64,
    },

    #[error("invalid elimination order: {0}")]
    InvalidOrder(String),

    #[error("{0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}
