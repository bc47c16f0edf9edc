use crate::point::ComplexValue;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("point {0} lies outside the domain")]
    OutsideDomain(ComplexValue),
    #[error("evaluation at a pole {0}")]
    Pole(ComplexValue),
    #[error("critical point: derivative vanishes at {0}")]
    CriticalPoint(ComplexValue),
    #[error("schwarzian bound {0} is not below 1/2")]
    NotQuasidisk(f64),
    #[error("invariant violated: {message} (witness {witness})")]
    Invariant { message: String, witness: ComplexValue },
    #[error("no admissible integration path to {0}")]
    NoPath(ComplexValue),
    #[error("normalization failed: {0}")]
    NormalizationFailed(String),
    #[error("integrator failure: {0}")]
    Integrator(String),
    #[error("integral diverges: {0}")]
    Divergent(String),
    #[error("quadrature did not converge: {0}")]
    NotConverged(String),
    #[error("truncation too short: need at least {required} coefficients, got {got}")]
    TruncationTooShort { required: usize, got: usize },
    #[error("radius too small: {0}")]
    RadiusTooSmall(String),
    #[error("normalization check failed: {0}")]
    NotNormalized(String),
    #[error("gate failed: {0}")]
    Gate(String),
    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::InvalidInput(e.to_string())
    }
}
