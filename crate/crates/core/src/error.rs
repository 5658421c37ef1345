use thiserror::Error;

/// Errors raised by grid construction, field computations and verifiers.
///
/// Verification *failures* are not errors: they are reported through the
/// `pass` flag of the corresponding report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("unsupported dimension {0} (only 1 and 2 are implemented)")]
    UnsupportedDimension(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point index {index} out of range for a grid of {len} points")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("ball of radius {radius} around point {center} contains no grid point")]
    EmptyBall { center: usize, radius: f64 },

    #[error("derivative of order {order} is not available for {function}")]
    DerivativeUnavailable { order: usize, function: String },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("empty set: {0}")]
    EmptySet(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
