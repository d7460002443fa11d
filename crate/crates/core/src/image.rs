//! Row-major intensity grids tagged with the quantity they hold.

use crate::error::{Error, Result};

/// Which physical quantity the pixels of an [`Image`] represent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    /// Noise-free amplitude `A`.
    Amplitude,
    /// Measured Rician magnitude `M`.
    Magnitude,
    /// Normalized squared magnitude `G = (M/σ)²`.
    SquaredG,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
    domain: Domain,
}

impl Image {
    /// Builds an image, rejecting wrong lengths and negative or non-finite pixels.
    pub fn new(width: usize, height: usize, pixels: Vec<f64>, domain: Domain) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::param(
                "dimensions",
                format!("image must be non-empty, got {width}x{height}"),
            ));
        }
        if pixels.len() != width * height {
            return Err(Error::param(
                "pixels",
                format!("expected {} values, got {}", width * height, pixels.len()),
            ));
        }
        if let Some(i) = pixels.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::param(
                "pixels",
                format!("value {} at index {i} is negative or not finite", pixels[i]),
            ));
        }
        Ok(Image {
            width,
            height,
            pixels,
            domain,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64, domain: Domain) -> Result<Self> {
        Self::new(width, height, vec![value; width * height], domain)
    }

    /// Caller guarantees the invariants; used on paths that produce valid pixels by construction.
    pub(crate) fn from_parts(width: usize, height: usize, pixels: Vec<f64>, domain: Domain) -> Self {
        debug_assert_eq!(pixels.len(), width * height);
        debug_assert!(pixels.iter().all(|v| v.is_finite() && *v >= 0.0));
        Image {
            width,
            height,
            pixels,
            domain,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<f64> {
        self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }

    pub fn max(&self) -> f64 {
        self.pixels.iter().copied().fold(0.0, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.pixels.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Relabels the domain without touching the pixels.
    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn expect_domain(&self, expected: Domain) -> Result<()> {
        if self.domain == expected {
            Ok(())
        } else {
            Err(Error::DomainMismatch {
                expected,
                actual: self.domain,
            })
        }
    }

    pub fn expect_same_shape(&self, other: &Image) -> Result<()> {
        if self.width == other.width && self.height == other.height {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                left_width: self.width,
                left_height: self.height,
                right_width: other.width,
                right_height: other.height,
            })
        }
    }

    pub(crate) fn map(&self, domain: Domain, f: impl Fn(f64) -> f64) -> Image {
        Image::from_parts(
            self.width,
            self.height,
            self.pixels.iter().map(|&v| f(v)).collect(),
            domain,
        )
    }
}
