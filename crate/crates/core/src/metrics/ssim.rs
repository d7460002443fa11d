//! Structural similarity with an 11×11 Gaussian window (σ = 1.5 px).
//!
//! Local statistics are computed with a separable, normalized Gaussian under
//! symmetric border mirroring, so the map has the same size as the inputs.

use crate::error::{Error, Result};
use crate::image::Image;
use crate::nlm::mirror;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsimParams {
    pub k1: f64,
    pub k2: f64,
    pub window_radius: usize,
    pub window_sigma: f64,
    /// `L` in `C1 = (k1·L)²`; `None` uses the maximum of the reference image.
    pub dynamic_range: Option<f64>,
}

impl Default for SsimParams {
    fn default() -> Self {
        SsimParams {
            k1: 0.01,
            k2: 0.03,
            window_radius: 5,
            window_sigma: 1.5,
            dynamic_range: None,
        }
    }
}

/// Per-pixel SSIM values; may be negative, so this is not an [`Image`].
#[derive(Debug, Clone, PartialEq)]
pub struct SsimMap {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
}

impl SsimMap {
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }
}

fn gaussian_taps(radius: usize, sigma: f64) -> Vec<f64> {
    let taps: Vec<f64> = (0..=2 * radius)
        .map(|i| {
            let d = i as f64 - radius as f64;
            (-d * d / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let total: f64 = taps.iter().sum();
    taps.into_iter().map(|t| t / total).collect()
}

fn blur(src: &[f64], w: usize, h: usize, taps: &[f64]) -> Vec<f64> {
    let r = (taps.len() / 2) as isize;
    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        for x in 0..w {
            let mut acc = 0.0;
            for (k, t) in taps.iter().enumerate() {
                acc += t * row[mirror(x as isize + k as isize - r, w)];
            }
            tmp[y * w + x] = acc;
        }
    }
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, t) in taps.iter().enumerate() {
                acc += t * tmp[mirror(y as isize + k as isize - r, h) * w + x];
            }
            out[y * w + x] = acc;
        }
    }
    out
}

/// Mean SSIM and the SSIM map of `est` against `reference`.
pub fn ssim(reference: &Image, est: &Image, p: &SsimParams) -> Result<(f64, SsimMap)> {
    reference.expect_same_shape(est)?;
    if !(p.k1 > 0.0 && p.k2 > 0.0 && p.window_sigma > 0.0) {
        return Err(Error::param("ssim", "k1, k2 and window sigma must be positive"));
    }
    let l = p.dynamic_range.unwrap_or_else(|| reference.max());
    if !(l.is_finite() && l > 0.0) {
        return Err(Error::param("dynamic_range", format!("must be > 0, got {l}")));
    }
    let (w, h) = (reference.width(), reference.height());
    let c1 = (p.k1 * l).powi(2);
    let c2 = (p.k2 * l).powi(2);
    let taps = gaussian_taps(p.window_radius, p.window_sigma);

    let x = reference.pixels();
    let y = est.pixels();
    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(y).map(|(a, b)| a * b).collect();

    let mx = blur(x, w, h, &taps);
    let my = blur(y, w, h, &taps);
    let sxx = blur(&xx, w, h, &taps);
    let syy = blur(&yy, w, h, &taps);
    let sxy = blur(&xy, w, h, &taps);

    let values: Vec<f64> = (0..w * h)
        .map(|i| {
            let (ux, uy) = (mx[i], my[i]);
            let vx = sxx[i] - ux * ux;
            let vy = syy[i] - uy * uy;
            let cov = sxy[i] - ux * uy;
            ((2.0 * ux * uy + c1) * (2.0 * cov + c2))
                / ((ux * ux + uy * uy + c1) * (vx + vy + c2))
        })
        .collect();
    let map = SsimMap {
        width: w,
        height: h,
        values,
    };
    Ok((map.mean(), map))
}
