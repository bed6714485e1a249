use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the dimension or number of bases was violated.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported configuration d={d}, N={n}: {reason}")]
    Unsupported { d: usize, n: usize, reason: String },

    /// An integration chamber produced a negative volume, i.e. its bounds cross.
    #[error("chamber inconsistency in `{label}`: integral evaluates to {value}")]
    ChamberInconsistency { label: String, value: String },

    #[error("cannot parse rational `{0}`")]
    ParseRational(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
