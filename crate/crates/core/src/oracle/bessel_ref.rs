//! Extended-precision reference for `I₀`, independent of
//! [`crate::similarity::bessel`].
//!
//! Values are carried in double-double arithmetic (an unevaluated sum of two
//! `f64`s, about 31 significant digits). Up to `x = 700` the ascending series
//! is summed directly; beyond 40 the logarithm may instead be taken from the
//! Hankel expansion, whose smallest term there is below `1e-34`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Digits a double-double value resolves.
pub const MAX_DIGITS: u32 = 31;

const SERIES_VALUE_LIMIT: f64 = 700.0;
const ASYMPTOTIC_FROM: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

impl DoubleDouble {
    pub const ZERO: DoubleDouble = DoubleDouble { hi: 0.0, lo: 0.0 };
    pub const ONE: DoubleDouble = DoubleDouble { hi: 1.0, lo: 0.0 };

    pub fn from_f64(v: f64) -> Self {
        DoubleDouble { hi: v, lo: 0.0 }
    }

    pub fn div_f64(self, d: f64) -> Self {
        let q1 = self.hi / d;
        // r = self − q1·d, exactly representable up to the lo part.
        let p = q1 * d;
        let pe = q1.mul_add(d, -p);
        let (s, e) = two_sum(self.hi, -p);
        let r = s + (e - pe + self.lo);
        let q2 = r / d;
        let (hi, lo) = quick_two_sum(q1, q2);
        DoubleDouble { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

impl std::ops::Add for DoubleDouble {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DoubleDouble { hi, lo }
    }
}

impl std::ops::Mul for DoubleDouble {
    type Output = Self;

    fn mul(self, o: Self) -> Self {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DoubleDouble { hi, lo }
    }
}

/// `Σ_{k≥1} (x²/4)^k/(k!)²` in double-double, i.e. `I₀(x) − 1`.
fn series_tail(x: f64) -> DoubleDouble {
    let xx = x * x;
    let q = DoubleDouble {
        hi: xx,
        lo: x.mul_add(x, -xx),
    }
    .div_f64(4.0);
    let mut term = DoubleDouble::ONE;
    let mut sum = DoubleDouble::ZERO;
    let mut k = 1.0f64;
    loop {
        term = (term * q).div_f64(k * k);
        sum = sum + term;
        if term.hi <= 1e-34 * sum.hi {
            return sum;
        }
        k += 1.0;
    }
}

/// `ln(Σ_{k≥0} c_k / x^k)` for the Hankel expansion of `I₀`.
fn hankel_log(x: f64) -> f64 {
    let mut term = DoubleDouble::ONE;
    let mut sum = DoubleDouble::ZERO;
    let mut k = 1.0f64;
    loop {
        let odd = 2.0 * k - 1.0;
        term = (term * DoubleDouble::from_f64(odd * odd)).div_f64(8.0 * k * x);
        if term.hi <= 1e-34 || k > 200.0 {
            break;
        }
        sum = sum + term;
        k += 1.0;
    }
    sum.hi.ln_1p() + sum.lo / (1.0 + sum.hi)
}

/// `ln I₀(x)` from the reference expansions, for quadrature integrands.
pub fn reference_ln_i0(x: f64) -> f64 {
    if x <= ASYMPTOTIC_FROM {
        let t = series_tail(x);
        t.hi.ln_1p() + t.lo / (1.0 + t.hi)
    } else {
        x - 0.5 * (2.0 * PI * x).ln() + hankel_log(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselReference {
    pub x: f64,
    /// `I₀(x)` itself, when it is representable (`x <= 700`).
    pub value: Option<DoubleDouble>,
    pub ln_value: f64,
}

/// Reference `I₀(x)` for `x ∈ [0, 1e8]` at up to [`MAX_DIGITS`] digits.
pub fn bessel_reference(x: f64, precision_digits: u32) -> Result<BesselReference> {
    if !(x.is_finite() && (0.0..=1e8).contains(&x)) {
        return Err(Error::param("x", format!("must lie in [0, 1e8], got {x}")));
    }
    if precision_digits > MAX_DIGITS {
        return Err(Error::param(
            "precision_digits",
            format!("at most {MAX_DIGITS} digits are carried, {precision_digits} requested"),
        ));
    }
    let value = (x <= SERIES_VALUE_LIMIT).then(|| DoubleDouble::ONE + series_tail(x));
    Ok(BesselReference {
        x,
        value,
        ln_value: reference_ln_i0(x),
    })
}
