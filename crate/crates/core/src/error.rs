use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("probabilities sum to {sum}, expected 1 (tolerance {tolerance:e})")]
    NotNormalized { sum: f64, tolerance: f64 },

    #[error("invalid probability {0}: must be a finite value in [0, 1]")]
    InvalidProbability(f64),

    #[error("non-finite value {0} in distribution support")]
    NonFiniteValue(f64),

    #[error("distribution has no support")]
    EmptyDistribution,

    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("conditional probability undefined: evidence has probability zero")]
    UndefinedConditional,

    #[error("indeterminate odds: product of zero and infinite ratios")]
    IndeterminateOdds,

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),

    #[error("outcome {value} is below the significance threshold (must exceed {threshold})")]
    BelowThreshold { value: f64, threshold: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("at least {required} decisions are required, got {found}")]
    TooFewDecisions { required: usize, found: usize },

    #[error("no fair probability in (0, 1) for certain outcome {certain} and uncertain outcome {uncertain}")]
    NoFairProbability { certain: f64, uncertain: f64 },

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("decision `{decision}`: {source}")]
    InDecision {
        decision: String,
        #[source]
        source: Box<Error>,
    },
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

impl Error {
    pub(crate) fn in_decision(self, decision: impl Into<String>) -> Self {
        Error::InDecision {
            decision: decision.into(),
            source: Box::new(self),
        }
    }

    /// Strips any decision context and returns the underlying error.
    pub fn root(&self) -> &Error {
        match self {
            Error::InDecision { source, .. } => source.root(),
            other => other,
        }
    }

    /// Whether the error stems from a utility-domain restriction.
    pub fn is_domain_error(&self) -> bool {
        matches!(self.root(), Error::BelowThreshold { .. })
    }
}
