use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("not a projective point")]
    NotProjectivePoint,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("immersion failure: {0}")]
    ImmersionFailure(String),

    #[error("orientability unknown")]
    OrientabilityUnknown,

    #[error("not relatively orientable")]
    NotRelativelyOrientable,

    #[error("inconsistent orientation frames: {0}")]
    InconsistentOrientation(String),

    #[error("on center of projection")]
    OnCenter,

    #[error("critical point")]
    CriticalPoint,

    #[error("wall point")]
    WallPoint,

    #[error("could not find regular value after {0} attempts")]
    NoRegularValue(usize),

    #[error("incomplete fibres: {0}")]
    IncompleteFibres(String),

    #[error("non-transversal crossing")]
    NonTransversal,

    #[error("could not find generic path after {0} attempts")]
    NoGenericPath(usize),

    #[error("difference formula mismatch: {0}")]
    DifferenceMismatch(String),

    #[error("common factor")]
    CommonFactor,

    #[error("regular values disagree: {0} vs {1}")]
    RegularValueDisagreement(i64, i64),

    #[error("U on center")]
    SubspaceOnCenter,

    #[error("choose generic configuration: {0}")]
    NonGenericConfiguration(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Errors that mean the numerics could not certify a result, as opposed to
    /// bad input. The CLI maps these to exit code 2.
    pub fn is_certification_failure(&self) -> bool {
        matches!(
            self,
            Error::IncompleteFibres(_)
                | Error::DifferenceMismatch(_)
                | Error::RegularValueDisagreement(..)
                | Error::NoGenericPath(_)
                | Error::NoRegularValue(_)
                | Error::InconsistentOrientation(_)
        )
    }
}
