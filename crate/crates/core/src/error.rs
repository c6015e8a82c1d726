use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the domain of the operation (non-finite value, bits out of range, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The network cannot be modeled (for example, every gain is zero).
    #[error("degenerate network: {0}")]
    Degenerate(String),

    /// A network or code document does not follow the file schema.
    #[error("schema error: {0}")]
    Schema(String),

    /// A structural invariant of a topology, model or code does not hold.
    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("missing transmission from node {0}")]
    MissingTransmission(usize),

    /// Exhaustive work would exceed the configured limit.
    #[error("{what}: size {size} exceeds the limit {limit}; {hint}")]
    TooLarge {
        what: String,
        size: u128,
        limit: u128,
        hint: &'static str,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The requested computation is deliberately not supported.
    #[error("refused: {0}")]
    Refused(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
