//! Crate-wide error type.
//!
//! Every fallible operation returns [`SimError`]; variants distinguish
//! validation failures (bad inputs, degenerate geometry) from numerical
//! degeneracies detected at run time (zero-modulus sums that leave a
//! pointer direction undefined).

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("non-finite {what}: {value}")]
    NonFinite { what: &'static str, value: f64 },

    #[error("wavelength must be positive, got {0}")]
    InvalidWavelength(f64),

    #[error("segment length must be non-negative, got {0}")]
    NegativeLength(f64),

    #[error("normalization must be positive and finite, got {0}")]
    InvalidNormalization(f64),

    #[error("|amplitude|^2 / normalization = {ratio} exceeds 1 beyond slack {slack}; the scenario normalization {normalization} is mis-specified")]
    NormalizationExceeded {
        ratio: f64,
        normalization: f64,
        slack: f64,
    },

    #[error("probability out of range [0, 1]: {0}")]
    ProbabilityOutOfRange(f64),

    #[error("degenerate path: {0}")]
    DegeneratePath(String),

    #[error("invalid stream: {0}")]
    InvalidStream(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("loop is not closed: endpoints differ by {gap} rad (mod 2π)")]
    OpenLoop { gap: f64 },

    #[error("index range {start}..{end} out of bounds for {len} paths")]
    RangeOutOfBounds {
        start: usize,
        end: usize,
        len: usize,
    },

    #[error("degenerate local sum at setting {setting}: modulus {modulus} leaves the pointer direction undefined")]
    DegenerateLocalSum { setting: f64, modulus: f64 },

    #[error("degenerate stream sum: modulus {modulus} is too small to normalize against")]
    DegenerateStreamSum { modulus: f64 },

    #[error("invalid setting: {0}")]
    InvalidSetting(String),

    #[error("invalid trial count: {0}")]
    InvalidTrialCount(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SimError>;
