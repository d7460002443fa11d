//! Independent numerical ground truth for the closed-form similarity
//! measures, the Bessel routines and the bias-removal experiment.
//!
//! Every integrand here is evaluated through [`bessel_ref::reference_ln_i0`],
//! never through the production Bessel code.

pub mod bessel_ref;
pub mod hist;
pub mod quadrature;

pub use bessel_ref::{bessel_reference, BesselReference, DoubleDouble};
pub use hist::{
    hist_experiment, hist_experiment_binned, p1_nonpos_pure_noise, p2_nonpos_pure_noise_normal,
    HistExperimentResult, HistogramBins,
};
pub use quadrature::{integrate, QuadResult, QuadratureConfig};

use bessel_ref::reference_ln_i0;

use crate::error::{check_non_negative, check_sigma, Error, Result};

const PANELS: usize = 8;

/// Which likelihood family a correlation measure is built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CsmKind {
    /// Noncentral chi-square likelihood over `f`, inputs in the `G` domain.
    Nccs,
    /// Rician likelihood over `a` with weight `a`, inputs in the `M` domain.
    Rice { sigma: f64 },
}

fn validate(cfg: &QuadratureConfig) -> Result<()> {
    if !(cfg.abs_tol > 0.0 && cfg.abs_tol.is_finite()) {
        return Err(Error::param("abs_tol", "must be positive"));
    }
    if !(cfg.rel_tol >= 0.0 && cfg.rel_tol.is_finite()) {
        return Err(Error::param("rel_tol", "must be non-negative"));
    }
    Ok(())
}

/// `∫₀^∞ p(g_s|f) p(g_t|f) df` with `y = √f`.
fn nccs_overlap(g_s: f64, g_t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let (rs, rt) = (g_s.sqrt(), g_t.sqrt());
    let upper = 0.5 * (rs + rt) + cfg.envelope_cutoff();
    let base = -0.5 * (g_s + g_t);
    let f = |y: f64| {
        if y <= 0.0 {
            return 0.0;
        }
        let log = (0.5 * y).ln() + base - y * y + reference_ln_i0(y * rs) + reference_ln_i0(y * rt);
        log.exp()
    };
    Ok(integrate(f, 0.0, upper, PANELS, cfg)?.value)
}

/// `∫₀^∞ a · K_s(a) · K_t(a) da` with `K_m(a) = exp(−(a²+m²)/2σ²)·I₀(am/σ²)`,
/// the Rician likelihood without its `m/σ²` prefactor.
fn rice_overlap(m_s: f64, m_t: f64, sigma: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let s2 = sigma * sigma;
    let upper = 0.5 * (m_s + m_t) + sigma * cfg.envelope_cutoff();
    let base = -(m_s * m_s + m_t * m_t) / (2.0 * s2);
    let f = |a: f64| {
        if a <= 0.0 {
            return 0.0;
        }
        let log = a.ln() + base - a * a / s2
            + reference_ln_i0(a * m_s / s2)
            + reference_ln_i0(a * m_t / s2);
        log.exp()
    };
    Ok(integrate(f, 0.0, upper, PANELS, cfg)?.value)
}

/// Subtractive-measure integral over the NCCS likelihood.
pub fn quad_ssm_nccs(g_s: f64, g_t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_non_negative("g_s", g_s)?;
    check_non_negative("g_t", g_t)?;
    validate(cfg)?;
    nccs_overlap(g_s, g_t, cfg)
}

/// Ratio-measure integral `∫ a p(m_s|a) p(m_t|a) da` over the Rician likelihood.
pub fn quad_rsm_rice(m_s: f64, m_t: f64, sigma: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_non_negative("m_s", m_s)?;
    check_non_negative("m_t", m_t)?;
    check_sigma(sigma)?;
    validate(cfg)?;
    if m_s == 0.0 || m_t == 0.0 {
        return Ok(0.0);
    }
    let prefactor = m_s * m_t / (sigma * sigma * sigma * sigma);
    Ok(prefactor * rice_overlap(m_s, m_t, sigma, cfg)?)
}

/// Normalized inner product of two likelihood functions.
pub fn quad_csm(y_s: f64, y_t: f64, kind: CsmKind, cfg: &QuadratureConfig) -> Result<f64> {
    check_non_negative("y_s", y_s)?;
    check_non_negative("y_t", y_t)?;
    validate(cfg)?;
    let overlap = |p: f64, q: f64| match kind {
        CsmKind::Nccs => nccs_overlap(p, q, cfg),
        CsmKind::Rice { sigma } => {
            check_sigma(sigma)?;
            rice_overlap(p, q, sigma, cfg)
        }
    };
    let num = overlap(y_s, y_t)?;
    let ns = overlap(y_s, y_s)?;
    let nt = overlap(y_t, y_t)?;
    Ok(num / (ns * nt).sqrt())
}

/// Relative residual of `∫₀^∞ y e^{−y²} I₀(ay) I₀(by) dy = ½ e^{(a²+b²)/4} I₀(ab/2)`.
///
/// Both sides are scaled by `e^{−(a²+b²)/4}` so that large arguments stay
/// representable; the residual is `|quadrature − closed| / closed`.
pub fn lawrence_identity_check(a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64> {
    for (name, v) in [("a", a), ("b", b)] {
        check_non_negative(name, v)?;
        if v > 20.0 {
            return Err(Error::param(name, format!("must be at most 20, got {v}")));
        }
    }
    validate(cfg)?;
    let shift = 0.25 * (a * a + b * b);
    let upper = 0.5 * (a + b) + cfg.envelope_cutoff();
    let f = |y: f64| {
        if y <= 0.0 {
            return 0.0;
        }
        (y.ln() - y * y + reference_ln_i0(a * y) + reference_ln_i0(b * y) - shift).exp()
    };
    let quad = integrate(f, 0.0, upper, PANELS, cfg)?.value;
    let closed = 0.5 * reference_ln_i0(0.5 * a * b).exp();
    Ok((quad - closed).abs() / closed)
}
