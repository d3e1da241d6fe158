use thiserror::Error;

/// Everything that can go wrong in the library.
///
/// Times and magnitudes are carried as `f64` whatever the scalar type of the
/// computation, so the error type stays non-generic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("expected a square matrix: {entries} entries do not form a square")]
    NotSquare { entries: usize },
    #[error("matrix dimension must be at least 1")]
    EmptyMatrix,
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix is not Hermitian (‖a − a†‖ = {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("backward evolution from t = {from} to t = {to} is not supported")]
    BackwardTime { from: f64, to: f64 },
    #[error("trace vanished (|tr| = {trace:e}) at t = {time}")]
    TraceSingularity { time: f64, trace: f64 },
    #[error("cannot normalize: |tr| = {trace:e} is below the singularity floor")]
    ZeroTrace { trace: f64 },
    #[error("propagation produced non-finite values at t = {time}")]
    Diverged { time: f64 },
    #[error("state must have unit trace, got tr = {trace}")]
    NotUnitTrace { trace: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid time list: {0}")]
    InvalidTimes(String),
    #[error("a correlation needs at least one operator event")]
    EmptyEvents,
    #[error("degenerate long-time limit: {0}")]
    DegenerateLimit(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
