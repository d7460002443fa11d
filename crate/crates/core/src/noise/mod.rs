//! Rician and non-central chi-square (2 dof) noise model.
//!
//! A magnitude observation is `M = √((A + N_r)² + N_i²)` with `N_r, N_i` i.i.d.
//! `N(0, σ²)` (phase fixed at zero; the magnitude law does not depend on it).
//! Its normalized square `G = (M/σ)²` is NCCS with non-centrality `F = (A/σ)²`
//! and decomposes as `G = F + 2√F·ξ + η`, `ξ ~ N(0,1)`, `η ~ Exp(mean 2)`.

pub mod stream;

use std::f64::consts::PI;

pub use stream::{NoiseStream, GENERATOR_ID};

use crate::error::{check_non_negative, check_sigma, Result};
use crate::image::{Domain, Image};
use crate::similarity::bessel::{i0_scaled, i1_scaled};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    sigma: f64,
}

impl NoiseParams {
    pub fn new(sigma: f64) -> Result<Self> {
        check_sigma(sigma)?;
        Ok(NoiseParams { sigma })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// The additive and multiplicative parts of one NCCS observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseDecomposition {
    /// Non-centrality `F = (A/σ)²`.
    pub f: f64,
    /// Standard normal component.
    pub xi: f64,
    /// Exponential component with mean 2.
    pub eta: f64,
}

impl NoiseDecomposition {
    /// `F + 2√F·ξ + η`.
    pub fn g(&self) -> f64 {
        self.f + 2.0 * self.f.sqrt() * self.xi + self.eta
    }
}

/// Rician density `p(m | a)`. Zero for `m <= 0`.
pub fn rician_pdf(m: f64, a: f64, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    check_non_negative("a", a)?;
    if m.is_nan() {
        return Err(crate::error::Error::param("m", "must not be NaN"));
    }
    if m <= 0.0 {
        return Ok(0.0);
    }
    let s2 = sigma * sigma;
    let d = m - a;
    // (a² + m²)/2σ² = (m − a)²/2σ² + am/σ²; the second part cancels against I₀.
    Ok(m / s2 * (-(d * d) / (2.0 * s2)).exp() * i0_scaled(a * m / s2))
}

/// NCCS (2 dof) density `p(g | f)`. Zero for `g < 0`.
pub fn nccs_pdf(g: f64, f: f64) -> Result<f64> {
    check_non_negative("f", f)?;
    if g.is_nan() {
        return Err(crate::error::Error::param("g", "must not be NaN"));
    }
    if g < 0.0 {
        return Ok(0.0);
    }
    let d = g.sqrt() - f.sqrt();
    Ok(0.5 * (-0.5 * d * d).exp() * i0_scaled((f * g).sqrt()))
}

/// `E{M} = σ√(π/2)·L_{1/2}(−a²/2σ²)`.
pub fn rician_mean(a: f64, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    check_non_negative("a", a)?;
    // With z = a²/4σ²: L_{1/2}(−2z) = e^{−z}[(1 + 2z) I₀(z) + 2z I₁(z)].
    let z = a * a / (4.0 * sigma * sigma);
    let laguerre = (1.0 + 2.0 * z) * i0_scaled(z) + 2.0 * z * i1_scaled(z);
    Ok(sigma * (PI / 2.0).sqrt() * laguerre)
}

/// One Rician magnitude draw with zero phase.
#[inline]
pub fn sample_rician(a: f64, sigma: f64, stream: &mut NoiseStream) -> f64 {
    let (zr, zi) = stream.normal_pair();
    let re = a + sigma * zr;
    let im = sigma * zi;
    (re * re + im * im).sqrt()
}

/// A magnitude draw together with the decomposition of `(m/σ)²` built from
/// the same underlying Gaussian pair. Consumes the stream exactly like
/// [`sample_rician`].
pub fn sample_rician_decomposed(
    a: f64,
    sigma: f64,
    stream: &mut NoiseStream,
) -> (f64, NoiseDecomposition) {
    let (zr, zi) = stream.normal_pair();
    let re = a + sigma * zr;
    let im = sigma * zi;
    let m = (re * re + im * im).sqrt();
    let f = (a / sigma).powi(2);
    let decomposition = NoiseDecomposition {
        f,
        xi: zr,
        eta: zr * zr + zi * zi,
    };
    (m, decomposition)
}

/// Pixelwise `g = (m/σ)²`.
pub fn m_to_g(image: &Image, sigma: f64) -> Result<Image> {
    check_sigma(sigma)?;
    image.expect_domain(Domain::Magnitude)?;
    Ok(image.map(Domain::SquaredG, |m| {
        let r = m / sigma;
        r * r
    }))
}

/// `a = σ√g`, the inverse of [`m_to_g`] for a single value.
pub fn g_to_a(g: f64, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    check_non_negative("g", g)?;
    Ok(sigma * g.sqrt())
}
