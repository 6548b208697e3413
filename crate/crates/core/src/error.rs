use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AdcError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid pipeline state: {0}")]
    InvalidState(String),

    /// Tone parameters do not produce a coherent, non-repeating record.
    #[error("coherence error: cycles={cycles} and n_fft={n_fft} must be coprime with 1 <= cycles < n_fft/2")]
    Coherence { cycles: usize, n_fft: usize },

    #[error("degenerate converter: output stuck at code {code} over the whole sweep")]
    DegenerateConverter { code: u32 },

    #[error("degenerate range: {0}")]
    DegenerateRange(String),

    #[error("degenerate signal: {0}")]
    DegenerateSignal(String),

    /// Configuration invariant violated; `field` names the offending key.
    #[error("invalid configuration field `{field}`: {reason}")]
    Config { field: String, reason: String },
}

pub type Result<T> = std::result::Result<T, AdcError>;

pub(crate) fn finite(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(AdcError::InvalidInput(format!("{name} must be finite, got {v}")))
    }
}
