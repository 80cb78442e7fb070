use thiserror::Error;

/// Errors produced by the geometry, noise, bound, and screening layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("duplicate points {i} and {j} (distance {distance:e})")]
    DuplicatePoint { i: usize, j: usize, distance: f64 },

    #[error("index {index} out of range for constellation of size {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("need at least {required} points, constellation has {found}")]
    NotEnoughPoints { required: usize, found: usize },

    #[error("constellation must contain at least one point")]
    EmptyConstellation,

    #[error("non-finite coordinate in point {index}")]
    NonFiniteCoordinate { index: usize },

    #[error("invalid priors: {0}")]
    InvalidPriors(String),

    #[error("invalid labels: expected {expected}, got {found}")]
    InvalidLabels { expected: usize, found: usize },

    #[error("sample count must be at least {min}, got {found}")]
    InvalidSampleCount { min: usize, found: usize },

    #[error("{name} must be positive and finite, got {value}")]
    NonpositiveInput { name: &'static str, value: f64 },

    #[error("reference power must be positive and finite, got {0}")]
    NonpositivePower(f64),

    #[error("lambda must lie in [0, 1], got {0}")]
    LambdaOutOfRange(f64),

    #[error("vector is not unit length (norm {0})")]
    NotUnitVector(f64),

    #[error("gamma grid is empty")]
    EmptyGrid,

    #[error("gamma grid must be positive and strictly increasing")]
    InvalidGrid,

    #[error("candidate list is empty")]
    EmptyCandidateList,

    #[error("unknown catalog entry `{0}`")]
    UnknownName(String),

    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
