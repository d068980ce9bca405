use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unknown card code {0:?}")]
    UnknownCard(String),

    #[error("duplicate card {0}")]
    DuplicateCard(String),

    #[error("invalid betting configuration: {0}")]
    InvalidConfig(String),

    #[error("degenerate beliefs: no compatible hand pair carries positive weight")]
    DegenerateBeliefs,

    #[error("hand {0} is not part of the instance")]
    UnknownHand(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("size guard exceeded: {size} > {guard}")]
    SizeGuard { size: u128, guard: u128 },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("strategy violates sequence-form constraints (residual {0:e})")]
    InfeasibleStrategy(f64),

    #[error("sparsification does not reconstruct the payoff matrix (error {0:e})")]
    NonReconstructing(f64),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("corrupt header: {0}")]
    CorruptHeader(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable identifier, used by the CLI exit line.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "E_INVALID_INPUT",
            Error::UnknownCard(_) => "E_UNKNOWN_CARD",
            Error::DuplicateCard(_) => "E_DUPLICATE_CARD",
            Error::InvalidConfig(_) => "E_CONFIG",
            Error::DegenerateBeliefs => "E_DEGENERATE_BELIEFS",
            Error::UnknownHand(_) => "E_UNKNOWN_HAND",
            Error::DimensionMismatch(_) => "E_DIMENSION",
            Error::SizeGuard { .. } => "E_SIZE_GUARD",
            Error::Contract(_) => "E_CONTRACT",
            Error::InfeasibleStrategy(_) => "E_INFEASIBLE_STRATEGY",
            Error::NonReconstructing(_) => "E_NON_RECONSTRUCTING",
            Error::Parse { .. } => "E_PARSE",
            Error::CorruptHeader(_) => "E_CORRUPT_HEADER",
            Error::Io(_) => "E_IO",
            Error::Json(_) => "E_JSON",
        }
    }

    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}
