use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("constant term at byte {pos}: polynomials must vanish at (0, 0)")]
    ConstantTerm { pos: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid model: {0}")]
    InvalidSpec(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    /// A perturbation denominator `lambda_p - lambda_i` vanished.
    #[error("repeated eigenvalue {value} at indices {first} and {second}")]
    RepeatedEigenvalue {
        value: String,
        first: usize,
        second: usize,
    },

    /// Limits with multiplicity need the dedicated laws, not the simple-eigenvalue series.
    #[error("multiplicity regime: {0}")]
    MultiplicityRegime(String),

    #[error("near-coincident mixture coefficients {0:?}; use oracle sampling with a two-sample test")]
    NearCoincident(Vec<f64>),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
