//! Logarithms of the modified Bessel functions `I₀` and `I₁`.
//!
//! Every density and similarity measure in this crate multiplies an `I₀` by an
//! exponential that cancels most of its growth, so the functions here return
//! `ln Iν(x)` and never overflow. Two branches:
//!
//! * `x <= SERIES_LIMIT`: the ascending series `Σ (x²/4)^k / (k! (k+ν)!)`. All
//!   terms are positive, so the sum carries no cancellation. For `I₀` the
//!   result is formed as `ln_1p(Σ_{k≥1})`, which keeps full relative accuracy
//!   of the logarithm as `x → 0`.
//! * `x > SERIES_LIMIT`: the Hankel expansion
//!   `ln Iν(x) = x − ½ ln(2πx) + ln(1 + Σ_k a_k(ν) / x^k)`, truncated when the
//!   terms stop decreasing or drop below `f64` resolution.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Upper end of the series branch. The Hankel expansion of `I₀` is divergent;
/// its smallest term is roughly `e^{-2x}`, which falls below `1e-17` only for
/// `x ≳ 20`.
pub const SERIES_LIMIT: f64 = 20.0;

const TERM_EPS: f64 = 1e-17;

/// `ln I₀(x)` for finite `x >= 0`.
pub fn log_bessel_i0(x: f64) -> Result<f64> {
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::param("x", format!("must be finite and >= 0, got {x}")));
    }
    Ok(ln_i0(x))
}

/// `ln I₁(x)` for finite `x >= 0`; `-∞` at zero.
pub fn log_bessel_i1(x: f64) -> Result<f64> {
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::param("x", format!("must be finite and >= 0, got {x}")));
    }
    Ok(ln_i1(x))
}

/// Unchecked `ln I₀`. Callers guarantee `x` is finite and non-negative.
#[inline]
pub(crate) fn ln_i0(x: f64) -> f64 {
    debug_assert!(x >= 0.0 && x.is_finite(), "ln_i0({x})");
    if x <= SERIES_LIMIT {
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut tail = 0.0;
        let mut k = 1.0;
        loop {
            term *= q / (k * k);
            tail += term;
            if term <= TERM_EPS * tail {
                break;
            }
            k += 1.0;
        }
        tail.ln_1p()
    } else {
        x - 0.5 * (2.0 * PI * x).ln() + hankel_correction(0.0, x).ln_1p()
    }
}

#[inline]
pub(crate) fn ln_i1(x: f64) -> f64 {
    if x == 0.0 {
        return f64::NEG_INFINITY;
    }
    if x <= SERIES_LIMIT {
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        loop {
            term *= q / (k * (k + 1.0));
            sum += term;
            if term <= TERM_EPS * sum {
                break;
            }
            k += 1.0;
        }
        (0.5 * x).ln() + sum.ln()
    } else {
        x - 0.5 * (2.0 * PI * x).ln() + hankel_correction(4.0, x).ln_1p()
    }
}

/// `Σ_{k≥1} (−1)^k Π_{j≤k} (μ − (2j−1)²) / (k! (8x)^k)` with `μ = 4ν²`.
#[inline]
fn hankel_correction(mu: f64, x: f64) -> f64 {
    let inv8x = 1.0 / (8.0 * x);
    let mut term = 1.0;
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    let mut k = 1.0;
    // At least three correction terms before the stopping rule applies.
    loop {
        let odd = 2.0 * k - 1.0;
        term *= -(mu - odd * odd) * inv8x / k;
        let size = term.abs();
        if k > 3.0 && (size >= prev || size <= TERM_EPS) {
            break;
        }
        sum += term;
        prev = size;
        k += 1.0;
        if k > 60.0 {
            break;
        }
    }
    sum
}

/// `e^{-x} I₀(x)`, finite for every `x >= 0`.
#[inline]
pub(crate) fn i0_scaled(x: f64) -> f64 {
    if x <= SERIES_LIMIT {
        (ln_i0(x) - x).exp()
    } else {
        (1.0 + hankel_correction(0.0, x)) / (2.0 * PI * x).sqrt()
    }
}

#[inline]
pub(crate) fn i1_scaled(x: f64) -> f64 {
    if x <= SERIES_LIMIT {
        (ln_i1(x) - x).exp()
    } else {
        (1.0 + hankel_correction(4.0, x)) / (2.0 * PI * x).sqrt()
    }
}
