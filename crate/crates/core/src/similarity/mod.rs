//! Per-pixel similarity measures used as the factors of the NLM weight product.
//!
//! | kind        | input | closed form                                                  |
//! |-------------|-------|--------------------------------------------------------------|
//! | `Gauss`     | M     | `exp(−(y_s − y_t)²)`                                         |
//! | `GaussLimit`| M     | `exp(−(m_s − m_t)²/4σ²)`                                     |
//! | `Snl1`      | G     | `¼ e^{−(g_s+g_t)/4} I₀(√(g_s g_t)/2)`                        |
//! | `Snl2`      | M     | `(m_s m_t/2σ²) e^{−(m_s²+m_t²)/4σ²} I₀(m_s m_t/2σ²)`         |
//! | `Snl3`      | G     | `I₀(√(g_s g_t)/2) / √(I₀(g_s/2) I₀(g_t/2))`                  |
//! | `Snl4`      | M     | `I₀(m_s m_t/2σ²) / √(I₀(m_s²/2σ²) I₀(m_t²/2σ²))`             |
//!
//! `Snl1` and `Snl2` are the subtractive and rational posterior densities. They
//! peak away from the diagonal and are not scale invariant; they are kept so
//! that those defects can be demonstrated. `Snl3` and `Snl4` are their
//! normalized (correlation) counterparts and lie in `(0, 1]` with the maximum
//! exactly on the diagonal.

pub mod bessel;

use std::f64::consts::LN_2;

pub use bessel::{log_bessel_i0, log_bessel_i1};

use crate::error::{check_non_negative, check_sigma, Error, Result};
use crate::image::Domain;
use bessel::ln_i0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasureKind {
    Gauss,
    GaussLimit,
    Snl1,
    Snl2,
    Snl3,
    Snl4,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 6] = [
        MeasureKind::Gauss,
        MeasureKind::GaussLimit,
        MeasureKind::Snl1,
        MeasureKind::Snl2,
        MeasureKind::Snl3,
        MeasureKind::Snl4,
    ];

    /// The domain whose pixel values this measure compares.
    pub fn input_domain(self) -> Domain {
        match self {
            MeasureKind::Snl1 | MeasureKind::Snl3 => Domain::SquaredG,
            _ => Domain::Magnitude,
        }
    }

    /// Whether values are confined to `(0, 1]` with the maximum on the diagonal.
    pub fn is_bounded(self) -> bool {
        !matches!(self, MeasureKind::Snl1 | MeasureKind::Snl2)
    }

    pub fn name(self) -> &'static str {
        match self {
            MeasureKind::Gauss => "gauss",
            MeasureKind::GaussLimit => "gauss-limit",
            MeasureKind::Snl1 => "snl1",
            MeasureKind::Snl2 => "snl2",
            MeasureKind::Snl3 => "snl3",
            MeasureKind::Snl4 => "snl4",
        }
    }
}

impl std::str::FromStr for MeasureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MeasureKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::param("measure", format!("unknown measure `{s}`")))
    }
}

/// A similarity measure bound to its noise level.
///
/// Evaluation is split into a per-value [`prepare`](Self::prepare) step and a
/// pairwise [`log_pair`](Self::log_pair) step so that the self terms of the
/// correlation measures can be cached per pixel. [`log_value`](Self::log_value)
/// is defined as exactly that composition, so cached and uncached evaluation
/// agree bit for bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityMeasure {
    kind: MeasureKind,
    sigma: f64,
    inv_two_sigma_sq: f64,
}

impl SimilarityMeasure {
    /// `sigma` is ignored by the G-domain kinds and by `Gauss`, but must still be valid.
    pub fn new(kind: MeasureKind, sigma: f64) -> Result<Self> {
        check_sigma(sigma)?;
        Ok(SimilarityMeasure {
            kind,
            sigma,
            inv_two_sigma_sq: 1.0 / (2.0 * sigma * sigma),
        })
    }

    /// Measures that do not depend on a noise level.
    pub fn unscaled(kind: MeasureKind) -> Self {
        Self::new(kind, 1.0).expect("unit sigma is valid")
    }

    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    #[inline]
    pub fn prepare(&self, v: f64) -> f64 {
        match self.kind {
            MeasureKind::Snl3 => 0.5 * ln_i0(0.5 * v),
            MeasureKind::Snl4 => 0.5 * ln_i0(v * v * self.inv_two_sigma_sq),
            _ => 0.0,
        }
    }

    /// Logarithm of the measure given both values and their prepared terms.
    #[inline]
    pub fn log_pair(&self, a: f64, pa: f64, b: f64, pb: f64) -> f64 {
        match self.kind {
            MeasureKind::Gauss => {
                let d = a - b;
                -(d * d)
            }
            MeasureKind::GaussLimit => {
                let d = a - b;
                -(d * d) * 0.5 * self.inv_two_sigma_sq
            }
            MeasureKind::Snl1 => {
                -2.0 * LN_2 - 0.25 * (a + b) + ln_i0(0.5 * (a * b).sqrt())
            }
            MeasureKind::Snl2 => {
                let x = a * b * self.inv_two_sigma_sq;
                if x == 0.0 {
                    return f64::NEG_INFINITY;
                }
                x.ln() - 0.5 * (a * a + b * b) * self.inv_two_sigma_sq + ln_i0(x)
            }
            // Cauchy-Schwarz bounds both at 0; rounding must not push them above.
            MeasureKind::Snl3 => (ln_i0(0.5 * (a * b).sqrt()) - (pa + pb)).min(0.0),
            MeasureKind::Snl4 => (ln_i0(a * b * self.inv_two_sigma_sq) - (pa + pb)).min(0.0),
        }
    }

    #[inline]
    pub fn log_value(&self, a: f64, b: f64) -> f64 {
        self.log_pair(a, self.prepare(a), b, self.prepare(b))
    }

    pub fn value(&self, a: f64, b: f64) -> f64 {
        self.log_value(a, b).exp()
    }

    /// Checked evaluation for the measures that require non-negative input.
    pub fn try_value(&self, a: f64, b: f64) -> Result<f64> {
        match self.kind {
            MeasureKind::Gauss | MeasureKind::GaussLimit => {
                if !(a.is_finite() && b.is_finite()) {
                    return Err(Error::param("value", "inputs must be finite"));
                }
            }
            _ => {
                check_non_negative("source", a)?;
                check_non_negative("target", b)?;
            }
        }
        Ok(self.value(a, b))
    }
}

/// Gaussian measure `exp(−|y_s − y_t|²)`.
pub fn sm_gauss(y_s: f64, y_t: f64) -> f64 {
    let d = y_s - y_t;
    (-(d * d)).exp()
}

/// Subtractive posterior density for NCCS data.
pub fn snl1(g_s: f64, g_t: f64) -> Result<f64> {
    SimilarityMeasure::unscaled(MeasureKind::Snl1).try_value(g_s, g_t)
}

/// Rational posterior density for Rician data. Unbounded above.
pub fn snl2(m_s: f64, m_t: f64, sigma: f64) -> Result<f64> {
    SimilarityMeasure::new(MeasureKind::Snl2, sigma)?.try_value(m_s, m_t)
}

/// Correlation measure for NCCS data.
pub fn snl3(g_s: f64, g_t: f64) -> Result<f64> {
    SimilarityMeasure::unscaled(MeasureKind::Snl3).try_value(g_s, g_t)
}

/// Correlation measure for Rician data.
pub fn snl4(m_s: f64, m_t: f64, sigma: f64) -> Result<f64> {
    SimilarityMeasure::new(MeasureKind::Snl4, sigma)?.try_value(m_s, m_t)
}

/// High-SNR limit of [`snl4`]: `exp(−(m_s − m_t)²/4σ²)`.
pub fn snl4_gauss_approx(m_s: f64, m_t: f64, sigma: f64) -> Result<f64> {
    SimilarityMeasure::new(MeasureKind::GaussLimit, sigma)?.try_value(m_s, m_t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const I0_2: f64 = 2.279_585_302_336_067_3;
    const I0_HALF: f64 = 1.063_483_370_741_323_6;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn gauss_examples() {
        assert_eq!(sm_gauss(3.0, 3.0), 1.0);
        assert!(close(sm_gauss(0.0, 1.0), (-1.0f64).exp(), 1e-15));
        let m = SimilarityMeasure::unscaled(MeasureKind::Gauss);
        assert!(close(m.value(0.0, 1.0), sm_gauss(0.0, 1.0), 1e-15));
    }

    #[test]
    fn snl1_examples() {
        assert!(close(snl1(0.0, 0.0).unwrap(), 0.25, 1e-15));
        let expected = 0.25 * (-2.0f64).exp() * I0_2;
        assert!(close(snl1(4.0, 4.0).unwrap(), expected, 1e-13));
        assert!(snl1(-1.0, 2.0).is_err());
    }

    #[test]
    fn snl2_examples() {
        assert_eq!(snl2(0.0, 3.0, 1.0).unwrap(), 0.0);
        assert_eq!(snl2(3.0, 0.0, 2.0).unwrap(), 0.0);
        let expected = 0.5 * (-0.5f64).exp() * I0_HALF;
        assert!(close(snl2(1.0, 1.0, 1.0).unwrap(), expected, 1e-13));
        assert!((expected - 0.3225).abs() < 1e-3);
        assert!(snl2(1.0, 1.0, 0.0).is_err());
        assert!(snl2(-1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn snl2_exceeds_one_somewhere() {
        let mut best = 0.0f64;
        for i in 0..=60 {
            for j in 0..=60 {
                best = best.max(snl2(i as f64 * 0.5, j as f64 * 0.5, 1.0).unwrap());
            }
        }
        assert!(best > 1.0, "max snl2 on grid = {best}");
    }

    #[test]
    fn snl3_examples() {
        for g in [0.0, 1.0, 10.0, 1000.0] {
            assert_eq!(snl3(g, g).unwrap(), 1.0, "g = {g}");
        }
        assert!(close(snl3(0.0, 4.0).unwrap(), 1.0 / I0_2.sqrt(), 1e-13));
        let v = snl3(1e6, 1.0001e6).unwrap();
        assert!(v.is_finite() && v > 0.0 && v < 1.0, "{v}");
    }

    #[test]
    fn snl4_examples() {
        for m in [0.0, 0.3, 7.0, 250.0] {
            assert_eq!(snl4(m, m, 1.7).unwrap(), 1.0);
        }
        let v = snl4(20.0, 21.0, 1.0).unwrap();
        assert!((v - (-0.25f64).exp()).abs() <= 0.005, "{v}");
    }

    #[test]
    fn gauss_limit_examples() {
        assert_eq!(snl4_gauss_approx(5.0, 5.0, 2.0).unwrap(), 1.0);
        assert!(close(snl4_gauss_approx(0.0, 2.0, 1.0).unwrap(), (-1.0f64).exp(), 1e-15));
    }

    #[test]
    fn snl1_bounded_by_quarter_on_grid() {
        let mut max = 0.0f64;
        for i in 0..200 {
            for j in 0..200 {
                let gs = 50.0 * i as f64 / 199.0;
                let gt = 50.0 * j as f64 / 199.0;
                let v = snl1(gs, gt).unwrap();
                max = max.max(v);
                assert!(v <= 0.25, "snl1({gs}, {gt}) = {v}");
            }
        }
        assert_eq!(max, snl1(0.0, 0.0).unwrap());
    }

    fn argmax(values: impl Iterator<Item = (f64, f64)>) -> f64 {
        values
            .fold((f64::NAN, f64::NEG_INFINITY), |(bx, bv), (x, v)| {
                if v > bv {
                    (x, v)
                } else {
                    (bx, bv)
                }
            })
            .0
    }

    #[test]
    fn correlation_measures_peak_on_the_diagonal() {
        let step = 1e-3;
        for gs in 1..=20 {
            let gs = gs as f64;
            let at = argmax((-3000..=3000).filter_map(|i| {
                let gt = gs + i as f64 * step;
                (gt >= 0.0).then(|| (gt, snl3(gs, gt).unwrap()))
            }));
            assert_eq!(at, gs, "snl3 argmax for g_s = {gs}");
            let at = argmax((-3000..=3000).filter_map(|i| {
                let mt = gs + i as f64 * step;
                (mt >= 0.0).then(|| (mt, snl4(gs, mt, 1.0).unwrap()))
            }));
            assert_eq!(at, gs, "snl4 argmax for m_s = {gs}");
        }
    }

    #[test]
    fn posterior_measures_peak_below_the_diagonal() {
        for gs in 2..=20 {
            let gs = gs as f64;
            let at = argmax((0..=40_000).map(|i| {
                let gt = i as f64 * 1e-3;
                (gt, snl1(gs, gt).unwrap())
            }));
            assert!(at < gs, "snl1 argmax {at} for g_s = {gs}");
        }
        for ms in [0.5, 1.0, 2.0, 4.0, 8.0] {
            let diag = snl2(ms, ms, 1.0).unwrap();
            let best = (0..=20_000)
                .map(|i| snl2(ms, i as f64 * 1e-3, 1.0).unwrap())
                .fold(0.0, f64::max);
            assert!(best > diag, "m_s = {ms}: {best} vs diagonal {diag}");
        }
    }

    #[test]
    fn scale_dependence() {
        for c in [0.0, 0.5, 3.0, 40.0, 900.0] {
            assert_eq!(snl3(c, c).unwrap(), 1.0);
        }
        let a = snl1(1.0, 1.0).unwrap();
        let b = snl1(10.0, 10.0).unwrap();
        assert!((a - b).abs() > 1e-3);
    }

    #[test]
    fn parse_kinds() {
        for k in MeasureKind::ALL {
            assert_eq!(k.name().parse::<MeasureKind>().unwrap(), k);
        }
        assert!("snl9".parse::<MeasureKind>().is_err());
    }

    proptest! {
        #[test]
        fn symmetric(a in 0.0..60.0f64, b in 0.0..60.0f64, sigma in 0.2..5.0f64) {
            for kind in MeasureKind::ALL {
                let m = SimilarityMeasure::new(kind, sigma).unwrap();
                prop_assert_eq!(m.log_value(a, b).to_bits(), m.log_value(b, a).to_bits());
            }
        }

        #[test]
        fn bounded_measures_in_unit_interval(a in 0.0..200.0f64, b in 0.0..200.0f64, sigma in 0.2..5.0f64) {
            for kind in MeasureKind::ALL.into_iter().filter(|k| k.is_bounded()) {
                let v = SimilarityMeasure::new(kind, sigma).unwrap().value(a, b);
                prop_assert!((0.0..=1.0).contains(&v), "{:?}({}, {}) = {}", kind, a, b, v);
            }
        }

        #[test]
        fn reparametrization(ms in 0.0..30.0f64, mt in 0.0..30.0f64, sigma in 0.5..3.0f64) {
            let lhs = snl4(ms, mt, sigma).unwrap();
            let rhs = snl3((ms / sigma).powi(2), (mt / sigma).powi(2)).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12, "{} vs {}", lhs, rhs);
        }
    }
}
