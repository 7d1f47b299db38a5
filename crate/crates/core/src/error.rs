use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A precondition on an argument was violated.
    InvalidArgument(&'static str),
    /// The adaptive integrator could not reach the end of the interval.
    Integration {
        /// Momentum of the offending mode, `None` for non-mode systems.
        k: Option<f64>,
        reason: IntegrationFailure,
    },
    /// Quadrature did not reach the requested accuracy.
    Quadrature { estimate: f64, error: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntegrationFailure {
    StepUnderflow { t: f64, h: f64 },
    TooManySteps { t: f64 },
    NormDrift { drift: f64 },
    NonFinite { t: f64 },
}

impl Error {
    pub(crate) fn at_mode(self, k: f64) -> Self {
        match self {
            Error::Integration { reason, .. } => Error::Integration { k: Some(k), reason },
            other => other,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::Integration { k, reason } => {
                write!(f, "integration failed")?;
                if let Some(k) = k {
                    write!(f, " for mode k = {k}")?;
                }
                write!(f, ": {reason}")
            }
            Error::Quadrature { estimate, error } => {
                write!(f, "quadrature did not converge (estimate {estimate}, error {error})")
            }
        }
    }
}

impl fmt::Display for IntegrationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            IntegrationFailure::StepUnderflow { t, h } => {
                write!(f, "step size underflow (h = {h:e} at t = {t})")
            }
            IntegrationFailure::TooManySteps { t } => write!(f, "step budget exhausted at t = {t}"),
            IntegrationFailure::NormDrift { drift } => write!(f, "norm drift {drift:e} exceeds limit"),
            IntegrationFailure::NonFinite { t } => write!(f, "non-finite state at t = {t}"),
        }
    }
}

impl core::error::Error for Error {}
