use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid datum: {0}")]
    InvalidDatum(String),
    #[error("not a good grading: {0}")]
    NotGoodGrading(String),
    #[error("f is not homogeneous of degree -1: {0}")]
    DegreeMismatch(String),
    #[error("degenerate level form on g0")]
    DegenerateForm,
    #[error("unknown generator: {0}")]
    UnknownGenerator(String),
    #[error("momentum pairs with a non-abelian current")]
    NonAbelianMomentum,
    #[error("momentum pairing is not an integer constant: {0}")]
    NonIntegralPairing(String),
    #[error("undefined action: {0}")]
    UndefinedAction(String),
    #[error("state is not in the vacuum module")]
    NonVacuumModule,
    #[error("critical level")]
    CriticalLevel,
    #[error("grading mismatch: {0}")]
    GradingMismatch(String),
    #[error("zero part of the grading is not the Cartan subalgebra")]
    NonCartanZeroPart,
    #[error("state has nonzero charge")]
    NonZeroCharge,
    #[error("top coefficient mismatch: {0}")]
    TopCoefficientMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
