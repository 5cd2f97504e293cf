use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    /// The mass matrix has no inverse at the requested configuration.
    #[error("mass matrix is singular (pivot {pivot:e})")]
    SingularMass { pivot: f64 },

    #[error("linear system is singular (pivot {pivot:e}, threshold {threshold:e})")]
    SingularMatrix { pivot: f64, threshold: f64 },

    #[error("non-finite value encountered in {0}")]
    NonFiniteValue(&'static str),

    /// Newton iteration failed; `step` is the index of the step being computed
    /// when known.
    #[error("Newton iteration did not converge{}: {iterations} iterations, residual {residual:e}",
        step.map(|s| format!(" at step {s}")).unwrap_or_default())]
    NoConvergence {
        step: Option<usize>,
        iterations: usize,
        residual: f64,
    },

    #[error("inconsistent initial state: {0}")]
    InconsistentInitialState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn at_step(self, index: usize) -> Self {
        match self {
            Error::NoConvergence {
                iterations, residual, ..
            } => Error::NoConvergence {
                step: Some(index),
                iterations,
                residual,
            },
            other => other,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn check_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { what, expected, found })
    }
}
