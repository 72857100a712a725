use thiserror::Error;

/// Errors raised before or instead of a numerical result.
///
/// Mathematical outcomes such as a divergent Muckenhoupt constant are not
/// errors; they are reported through [`crate::Verdict`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("parameter `{name}` = {value} is out of range: {reason}")]
    Parameter { name: String, value: f64, reason: String },
    #[error("divergent mass: {0}")]
    DivergentMass(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("bisection failed: {0}")]
    Bracket(String),
    #[error("regularity fit failed: {0}")]
    Fit(String),
    #[error("operator not well defined: {0}")]
    WellDefined(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    pub fn param(name: &str, value: f64, reason: &str) -> Self {
        Error::Parameter { name: name.to_string(), value, reason: reason.to_string() }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
