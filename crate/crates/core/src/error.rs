use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate susceptibility denominator (|D| = {0:e})")]
    DegenerateDenominator(f64),

    #[error("steady state is not unique (condition number {0:e})")]
    NonUniqueSteadyState(f64),

    #[error("response table queried out of range: |omega_p| = {omega_p:e}, |omega_c| = {omega_c:e}")]
    ResponseOutOfRange { omega_p: f64, omega_c: f64 },

    #[error("field became non-finite at z = {0:e} m")]
    NonFiniteField(f64),

    #[error("quadrature did not converge (relative error estimate {0:e})")]
    QuadratureNonConvergence(f64),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Short machine-readable category name.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::DegenerateDenominator(_) => "degenerate-denominator",
            Error::NonUniqueSteadyState(_) => "non-unique-steady-state",
            Error::ResponseOutOfRange { .. } => "response-out-of-range",
            Error::NonFiniteField(_) => "nonfinite-field",
            Error::QuadratureNonConvergence(_) => "quadrature-nonconvergence",
            Error::UnknownPreset(_) => "unknown-preset",
            Error::Parse(_) => "parse-error",
        }
    }
}
