use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Every variant corresponds to rejected input or a violated precondition;
/// inequality violations are reported separately so callers can tell a bad
/// argument from a failed verification.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("singular matrix (|det| = {0:e})")]
    Singular(f64),

    #[error("duplicate point {0:?}")]
    DuplicatePoint(Vec<f64>),

    #[error("point {point:?} lies outside the sampled region of radius {region}")]
    PointOutsideRegion { point: Vec<f64>, region: f64 },

    #[error("ball of radius {radius} around {center:?} escapes the sampled region of radius {region}")]
    BallEscapesRegion {
        center: Vec<f64>,
        radius: f64,
        region: f64,
    },

    #[error("lattice vectors {first:?} and {second:?} project to the same physical point")]
    ProjectionCollision { first: Vec<i64>, second: Vec<i64> },

    #[error("empty {0}")]
    Empty(&'static str),

    #[error("body of circumradius {radius} exceeds the table cutoff {cutoff}")]
    BodyExceedsCutoff { radius: f64, cutoff: f64 },

    #[error("no witness with 0 < dy <= {max_dy} realised in the sample (region radius {region})")]
    WitnessNotFound { max_dy: f64, region: f64 },

    #[error("inequality violated: {0}")]
    InequalityViolation(String),

    #[error("parse error (line {line}): {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}
