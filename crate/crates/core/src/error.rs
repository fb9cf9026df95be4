use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("quadrature on [{a}, {b}] did not converge within {subdivisions} subdivisions (error estimate {error_estimate:e})")]
    NonConvergence { a: f64, b: f64, subdivisions: usize, error_estimate: f64 },
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("trial budget exhausted: {events} events after {trials} trials")]
    BudgetExceeded { trials: u64, events: u64 },
    #[error("decoding failed: {0}")]
    DecodeFailure(String),
    #[error("code construction failed: {0}")]
    ConstructionFailure(String),
    #[error("target not bracketed: {0}")]
    NoBracket(String),
    #[error("protocol version mismatch: expected {expected}, received {received}")]
    VersionMismatch { expected: u8, received: u8 },
    #[error("malformed frame: {0}")]
    MalformedFrame(String),
    #[error("timed out: {0}")]
    Timeout(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
