use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty series")]
    EmptySeries,
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("binary only: found {0} distinct labels")]
    BinaryOnly(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("series divergent: ||B - I||_2 = {norm} >= 1")]
    SeriesDivergent { norm: f64 },
    #[error("zero tolerance: series has zero standard deviation")]
    ZeroTolerance,
    #[error("state {state} out of range for {n_states} states")]
    StateOutOfRange { state: usize, n_states: usize },
    #[error("training diverged at epoch {epoch}")]
    Diverged { epoch: usize },
    #[error("window of length {window} exceeds data length {len}")]
    WindowTooLarge { window: usize, len: usize },
    #[error("single-class labels")]
    SingleClass,
    #[error("unknown feature: {0}")]
    UnknownFeature(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
