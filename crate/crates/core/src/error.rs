use thiserror::Error;

/// Errors raised by the verification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("exponent p = {0} is below 2")]
    ExponentTooSmall(f64),

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("evaluation at a degenerate point of the gauge")]
    DegeneratePoint,

    #[error("horizontal gradient vanishes and p < 4")]
    VanishingGradient,

    #[error("bounding-box acceptance rate {0:e} is below 1e-4")]
    LowAcceptance(f64),

    #[error("adaptive quadrature did not converge (estimate {value}, error {error:e})")]
    QuadratureDiverged { value: f64, error: f64 },

    #[error("inequality parameters not admissible: {0}")]
    Inadmissible(String),

    #[error("fit needs at least 4 points, got {0}")]
    FitTooFewPoints(usize),

    #[error("fit is singular")]
    FitSingular,
}

pub type Result<T> = std::result::Result<T, Error>;
