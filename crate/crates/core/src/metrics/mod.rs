//! Reconstruction quality: RMSE and centred RMSE in dB, and SSIM.

mod ssim;

pub use ssim::{ssim, SsimMap, SsimParams};

use crate::error::Result;
use crate::image::Image;

/// Returned instead of `−∞` when the (centred) error vanishes.
pub const EXACT_DB: f64 = -300.0;

pub const FLAG_EXACT: &str = "exact";
pub const FLAG_EXACT_AFTER_CENTERING: &str = "exact-after-centering";

/// A level in dB, with `exact` set when the sentinel was substituted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decibels {
    pub db: f64,
    pub exact: bool,
}

impl Decibels {
    fn from_mean_square(ms: f64) -> Self {
        if ms == 0.0 {
            Decibels {
                db: EXACT_DB,
                exact: true,
            }
        } else {
            Decibels {
                db: 20.0 * ms.sqrt().log10(),
                exact: false,
            }
        }
    }
}

fn errors(reference: &Image, est: &Image) -> Result<Vec<f64>> {
    reference.expect_same_shape(est)?;
    Ok(reference
        .pixels()
        .iter()
        .zip(est.pixels())
        .map(|(a, b)| a - b)
        .collect())
}

/// `20·log₁₀ √(mean e²)` with `e = reference − est`.
pub fn rmse_db(reference: &Image, est: &Image) -> Result<Decibels> {
    let e = errors(reference, est)?;
    let ms = e.iter().map(|v| v * v).sum::<f64>() / e.len() as f64;
    Ok(Decibels::from_mean_square(ms))
}

/// RMSE of the error after removing its sample mean.
///
/// A centred residual at the round-off level of the raw error (a pure
/// constant offset) counts as exact.
pub fn crmse_db(reference: &Image, est: &Image) -> Result<Decibels> {
    let e = errors(reference, est)?;
    let n = e.len() as f64;
    let mean = e.iter().sum::<f64>() / n;
    let raw_ms = e.iter().map(|v| v * v).sum::<f64>() / n;
    let ms = e.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let roundoff = (8.0 * f64::EPSILON).powi(2) * raw_ms;
    if ms <= roundoff {
        return Ok(Decibels {
            db: EXACT_DB,
            exact: true,
        });
    }
    Ok(Decibels::from_mean_square(ms))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub rmse_db: f64,
    pub crmse_db: f64,
    pub ssim_mean: f64,
    pub ssim_map: Option<SsimMap>,
    pub flags: Vec<&'static str>,
}

/// Computes all metrics of `est` against the ground truth `reference`.
pub fn evaluate(reference: &Image, est: &Image, ssim_params: &SsimParams) -> Result<MetricsReport> {
    let rmse = rmse_db(reference, est)?;
    let crmse = crmse_db(reference, est)?;
    let (ssim_mean, map) = ssim(reference, est, ssim_params)?;
    let mut flags = Vec::new();
    if rmse.exact {
        flags.push(FLAG_EXACT);
    }
    if crmse.exact {
        flags.push(FLAG_EXACT_AFTER_CENTERING);
    }
    Ok(MetricsReport {
        rmse_db: rmse.db,
        crmse_db: crmse.db,
        ssim_mean,
        ssim_map: Some(map),
        flags,
    })
}
