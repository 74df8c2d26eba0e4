use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("signal domain {signal_s} s does not match filter bank domain {bank_s} s")]
    DomainMismatch { signal_s: f64, bank_s: f64 },

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { got: usize, needed: usize },

    #[error("degenerate signal: |3L| = {magnitude:e} is below threshold {threshold:e}")]
    DegenerateSignal { magnitude: f64, threshold: f64 },

    #[error("window length must be positive, got {0}")]
    NonPositiveWindow(f64),

    #[error("filter bank has zero total response at phi = {phi}")]
    BankCoverage { phi: f64 },

    #[error("window [{start}, {end}] out of bounds for trace of {len} samples")]
    WindowOutOfBounds {
        start: usize,
        end: usize,
        len: usize,
    },

    #[error("sample period must be positive, got {0}")]
    NonPositivePeriod(f64),

    #[error("unknown channel `{0}`")]
    UnknownChannel(String),

    #[error("invalid sensor trace: {0}")]
    InvalidTrace(String),

    #[error("invalid scenario script: {0}")]
    InvalidScript(String),

    #[error("trace too short: {len} samples, one event window needs {needed}")]
    TraceTooShort { len: usize, needed: usize },

    #[error("class {class} has {got} labeled samples, calibration needs {needed}")]
    InsufficientSamples {
        class: String,
        got: usize,
        needed: usize,
    },

    #[error("cluster model has no calibrated classes")]
    UncalibratedModel,

    #[error("efficiency must be within [0, 1], got {0}")]
    InvalidEfficiency(f64),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
