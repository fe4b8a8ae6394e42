use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("zero mode is excluded from the cavity lattice")]
    ZeroMode,

    #[error("model {model} cannot couple to a {field} field")]
    ModelFieldMismatch { model: u8, field: &'static str },

    #[error("detector propagator evaluated at coincident times")]
    CoincidenceLimit,

    #[error("operation not applicable: {0}")]
    NotApplicable(String),

    #[error("not implemented: {0}")]
    NotImplemented(String),

    #[error("too few cutoffs for a convergence diagnosis (need {needed}, got {got})")]
    TooFewCutoffs { needed: usize, got: usize },

    #[error("malformed operator word: {0}")]
    MalformedWord(String),

    #[error("open spinor index `{0}`")]
    OpenSpinorIndex(String),

    #[error("time-ordered groups at coincident times ({0})")]
    CoincidentTimes(f64),

    #[error("symbol refers to a mode or field outside the configured space: {0}")]
    OutsideSpace(String),

    #[error("incompatible external state: {0}")]
    IncompatibleState(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
