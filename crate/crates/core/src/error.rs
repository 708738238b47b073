use thiserror::Error;

/// Errors raised by the fatigue reliability pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("length mismatch: {what} ({left} vs {right})")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("wind speed {0} m/s outside the operating band [{1}, {2}]")]
    OutOfBand(f64, f64, f64),

    #[error("simulation diverged: non-finite sample in channel {channel} at step {step}")]
    Diverged { channel: &'static str, step: usize },

    #[error("cycle mean {mean} Pa at or beyond ultimate strength {ultimate} Pa")]
    Overload { mean: f64, ultimate: f64 },

    #[error("malformed {what}: {reason}")]
    Parse { what: &'static str, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
