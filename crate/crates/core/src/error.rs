use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("matrix must be square with even dimension 2d, got {rows}x{cols}")]
    NotBlockShaped { rows: usize, cols: usize },

    #[error("operator is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("instrument is incomplete: completeness residual {residual:e}")]
    IncompleteInstrument { residual: f64 },

    #[error("instrument has no operators")]
    EmptyInstrument,

    #[error("outcome {outcome} has probability {probability:e}, below the zero-probability threshold")]
    ZeroProbabilityOutcome { outcome: usize, probability: f64 },

    #[error("outcome {outcome} out of range 1..={count}")]
    OutcomeOutOfRange { outcome: usize, count: usize },

    #[error("state is not of the form rho (+) 0: {0}")]
    NotEmbeddedState(String),

    #[error("operator is singular (min singular value {min_singular_value:e}); outcome is irreversible")]
    SingularOperator { min_singular_value: f64 },

    #[error("posterior undefined: success probability cos^2(phi) = {p_success:e} vanishes")]
    UndefinedPosterior { p_success: f64 },

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn dims(expected: impl ToString, found: impl ToString) -> Self {
        Error::DimensionMismatch { expected: expected.to_string(), found: found.to_string() }
    }
}
