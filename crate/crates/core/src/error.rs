use thiserror::Error;

use crate::image::Domain;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A numeric argument is outside the admissible range.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    /// An image was handed to an operation that expects another domain.
    #[error("domain mismatch: expected {expected:?}, got {actual:?}")]
    DomainMismatch { expected: Domain, actual: Domain },

    #[error("dimension mismatch: {left_width}x{left_height} vs {right_width}x{right_height}")]
    DimensionMismatch {
        left_width: usize,
        left_height: usize,
        right_width: usize,
        right_height: usize,
    },

    /// Every weight in a search window vanished, so `C_s` is zero.
    #[error("degenerate weights at pixel ({x}, {y}): normalizer is zero")]
    DegenerateWeights { x: usize, y: usize },

    #[error("quadrature did not converge: estimated error {error:e} after {subdivisions} subdivisions")]
    NonConvergence { error: f64, subdivisions: usize },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }
}

/// Checks that `sigma` is a finite, strictly positive noise level.
pub(crate) fn check_sigma(sigma: f64) -> Result<()> {
    if sigma.is_finite() && sigma > 0.0 {
        Ok(())
    } else {
        Err(Error::param("sigma", format!("must be finite and > 0, got {sigma}")))
    }
}

pub(crate) fn check_non_negative(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be finite and >= 0, got {value}")))
    }
}
