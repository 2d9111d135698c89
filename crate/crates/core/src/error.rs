use crate::mapexpr::{EvalError, ParseError};

/// Errors produced by the engines. Everything except `Parse`, `Invalid` and
/// `Internal` means "could not certify", never "the identity is false".
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("evaluation failed: {0}")]
    Eval(#[from] EvalError),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("point {point:?} lies outside the collared domain")]
    OutsideCollar { point: Vec<f64> },
    #[error("point {point:?} is within the tolerance band ({distance:e} from a class boundary)")]
    Ambiguous { point: Vec<f64>, distance: f64 },
    #[error("certification failed: {0}")]
    Certification(String),
    #[error("refinement budget exhausted: {0}")]
    Budget(String),
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("hypothesis not satisfied: {0}")]
    Precondition(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// True for failures that leave a verification undecided rather than
    /// signalling bad input or a bug.
    pub fn is_inconclusive(&self) -> bool {
        !matches!(
            self,
            Error::Parse(_) | Error::Invalid(_) | Error::Internal(_)
        )
    }
}
