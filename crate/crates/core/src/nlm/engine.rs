//! Weight computation and weighted averaging.
//!
//! Patches are read from a symmetrically mirrored copy of the weight-source
//! image; search windows are clipped to the image. The filter walks search
//! displacements in row-major order and, for each one, evaluates the
//! per-pixel log similarity once over the padded band before summing it over
//! patch offsets (again row-major). Every output pixel therefore sees the
//! same sequence of floating-point operations as a direct per-pair
//! evaluation, independent of banding and thread count.
//!
//! The average is accumulated as `Y_s + Σ w·(Y_t − Y_s) / Σ w`, which equals
//! the plain weighted mean but reproduces a constant input exactly.

use rayon::prelude::*;

use super::params::NlmParams;
use crate::error::{Error, Result};
use crate::image::Image;

/// Weights smaller than this are flushed to zero before accumulation.
pub const WEIGHT_FLOOR: f64 = 1e-12;

const BAND_ROWS: usize = 16;

/// Symmetric (edge-repeating) reflection of `i` into `0..n`.
#[inline]
pub fn mirror(i: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let m = i.rem_euclid(period) as usize;
    if m < n {
        m
    } else {
        2 * n - 1 - m
    }
}

/// Cap on `log w`. Only the unbounded SNL2 can reach it; it keeps a full
/// window of weights finite when summed.
pub const LOG_WEIGHT_CEILING: f64 = 600.0;

/// `exp(log_sim / h)`, capped above and flushed to zero below.
#[inline]
fn weight(log_sim: f64, h: f64) -> f64 {
    let w = (log_sim / h).min(LOG_WEIGHT_CEILING).exp();
    if w < WEIGHT_FLOOR {
        0.0
    } else {
        w
    }
}

/// Per-pixel weights of one source pixel over its clipped search window.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightField {
    pub source: (usize, usize),
    /// Targets in row-major window order.
    pub targets: Vec<(usize, usize)>,
    pub weights: Vec<f64>,
    /// `C_s`, the sum of `weights`.
    pub normalizer: f64,
}

impl WeightField {
    pub fn normalized(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w / self.normalizer).collect()
    }

    pub fn weight_to(&self, target: (usize, usize)) -> Option<f64> {
        self.targets
            .iter()
            .position(|&t| t == target)
            .map(|i| self.weights[i])
    }
}

fn check_pixel(img: &Image, p: (usize, usize)) -> Result<()> {
    if p.0 < img.width() && p.1 < img.height() {
        Ok(())
    } else {
        Err(Error::param(
            "pixel",
            format!("({}, {}) outside {}x{} image", p.0, p.1, img.width(), img.height()),
        ))
    }
}

/// `Σ_o β_o · ln SNL(y_{s+o}, y_{t+o})` over the patch, mirrored at borders.
pub fn patch_log_similarity(
    img: &Image,
    s: (usize, usize),
    t: (usize, usize),
    params: &NlmParams,
) -> Result<f64> {
    img.expect_domain(params.measure.kind().input_domain())?;
    check_pixel(img, s)?;
    check_pixel(img, t)?;
    Ok(patch_log_similarity_unchecked(img, s, t, params))
}

fn patch_log_similarity_unchecked(
    img: &Image,
    s: (usize, usize),
    t: (usize, usize),
    params: &NlmParams,
) -> f64 {
    let r = params.settings.patch_radius() as isize;
    let beta = params.settings.beta();
    let (w, h) = (img.width(), img.height());
    let mut acc = 0.0;
    let mut k = 0;
    for oy in -r..=r {
        for ox in -r..=r {
            let a = img.get(
                mirror(s.0 as isize + ox, w),
                mirror(s.1 as isize + oy, h),
            );
            let b = img.get(
                mirror(t.0 as isize + ox, w),
                mirror(t.1 as isize + oy, h),
            );
            acc += beta[k] * params.measure.log_value(a, b);
            k += 1;
        }
    }
    acc
}

/// Weights `w_{s,t} = exp(patch_log_similarity / h)` for one source pixel.
pub fn nlm_weights(img: &Image, s: (usize, usize), params: &NlmParams) -> Result<WeightField> {
    img.expect_domain(params.measure.kind().input_domain())?;
    check_pixel(img, s)?;
    let sr = params.settings.search_radius() as isize;
    let h = params.settings.h();
    let mut targets = Vec::new();
    let mut weights = Vec::new();
    let mut normalizer = 0.0;
    for dy in -sr..=sr {
        for dx in -sr..=sr {
            let (tx, ty) = (s.0 as isize + dx, s.1 as isize + dy);
            if tx < 0 || ty < 0 || tx >= img.width() as isize || ty >= img.height() as isize {
                continue;
            }
            let t = (tx as usize, ty as usize);
            let w = weight(patch_log_similarity_unchecked(img, s, t, params), h);
            targets.push(t);
            weights.push(w);
            normalizer += w;
        }
    }
    if normalizer == 0.0 {
        return Err(Error::DegenerateWeights { x: s.0, y: s.1 });
    }
    Ok(WeightField {
        source: s,
        targets,
        weights,
        normalizer,
    })
}

/// Weighted average of `img` with weights computed from `img` itself.
pub fn nlm_filter(img: &Image, params: &NlmParams) -> Result<Image> {
    weighted_average(img, img, params)
}

/// Weighted average of `values` with weights computed from `weight_source`.
///
/// The two images must share dimensions; `weight_source` must be in the
/// measure's input domain. The output carries the domain of `values`.
pub fn weighted_average(weight_source: &Image, values: &Image, params: &NlmParams) -> Result<Image> {
    weight_source.expect_domain(params.measure.kind().input_domain())?;
    weight_source.expect_same_shape(values)?;
    let (w, h) = (weight_source.width(), weight_source.height());
    let pr = params.settings.patch_radius();
    let pw = w + 2 * pr;
    let ph = h + 2 * pr;

    let mut padded = Vec::with_capacity(pw * ph);
    for py in 0..ph {
        let y = mirror(py as isize - pr as isize, h);
        for px in 0..pw {
            padded.push(weight_source.get(mirror(px as isize - pr as isize, w), y));
        }
    }
    let prepared: Vec<f64> = padded.iter().map(|&v| params.measure.prepare(v)).collect();
    let ctx = Context {
        params,
        padded: &padded,
        prepared: &prepared,
        values: values.pixels(),
        width: w,
        height: h,
        padded_width: pw,
    };

    let mut out = vec![0.0; w * h];
    let failure = out
        .par_chunks_mut(BAND_ROWS * w)
        .enumerate()
        .map(|(band, rows)| ctx.filter_band(band * BAND_ROWS, rows))
        .find_first(|r| r.is_err());
    if let Some(Err(e)) = failure {
        return Err(e);
    }
    Ok(Image::from_parts(w, h, out, values.domain()))
}

struct Context<'a> {
    params: &'a NlmParams,
    padded: &'a [f64],
    prepared: &'a [f64],
    values: &'a [f64],
    width: usize,
    height: usize,
    padded_width: usize,
}

impl Context<'_> {
    fn filter_band(&self, y0: usize, out: &mut [f64]) -> Result<()> {
        let w = self.width;
        let rows = out.len() / w;
        let pr = self.params.settings.patch_radius();
        let side = 2 * pr + 1;
        let sr = self.params.settings.search_radius() as isize;
        let h = self.params.settings.h();
        let beta = self.params.settings.beta();
        let measure = &self.params.measure;
        let pw = self.padded_width;

        // Log similarity for padded rows y0 .. y0 + rows + 2pr, all columns.
        let lrows = rows + 2 * pr;
        let mut logsim = vec![0.0; lrows * pw];
        let mut num = vec![0.0; rows * w];
        let mut den = vec![0.0; rows * w];

        for dy in -sr..=sr {
            for dx in -sr..=sr {
                // Output columns/rows whose target stays inside the image.
                let x_lo = (-dx).max(0) as usize;
                let x_hi = (w as isize - dx.max(0)).max(0) as usize;
                let y_lo = ((-dy).max(0) as usize).max(y0);
                let y_hi = ((self.height as isize - dy.max(0)).max(0) as usize).min(y0 + rows);
                if x_lo >= x_hi || y_lo >= y_hi {
                    continue;
                }
                // Padded columns x_lo .. x_hi + 2pr and rows y_lo .. y_hi + 2pr.
                for py in y_lo..y_hi + 2 * pr {
                    let ty = (py as isize + dy) as usize;
                    let src = &self.padded[py * pw..(py + 1) * pw];
                    let psrc = &self.prepared[py * pw..(py + 1) * pw];
                    let dst = &self.padded[ty * pw..(ty + 1) * pw];
                    let pdst = &self.prepared[ty * pw..(ty + 1) * pw];
                    let lrow = &mut logsim[(py - y0) * pw..(py - y0 + 1) * pw];
                    for px in x_lo..x_hi + 2 * pr {
                        let tx = (px as isize + dx) as usize;
                        lrow[px] = measure.log_pair(src[px], psrc[px], dst[tx], pdst[tx]);
                    }
                }
                for y in y_lo..y_hi {
                    let ty = (y as isize + dy) as usize;
                    let ly = y - y0;
                    for x in x_lo..x_hi {
                        let mut acc = 0.0;
                        for oy in 0..side {
                            let lrow = &logsim[(ly + oy) * pw..];
                            let brow = &beta[oy * side..(oy + 1) * side];
                            for (ox, b) in brow.iter().enumerate() {
                                acc += b * lrow[x + ox];
                            }
                        }
                        let wgt = weight(acc, h);
                        let tx = (x as isize + dx) as usize;
                        let i = ly * w + x;
                        num[i] += wgt * (self.values[ty * w + tx] - self.values[y * w + x]);
                        den[i] += wgt;
                    }
                }
            }
        }

        for (i, o) in out.iter_mut().enumerate() {
            if den[i] == 0.0 {
                return Err(Error::DegenerateWeights {
                    x: i % w,
                    y: y0 + i / w,
                });
            }
            *o = self.values[y0 * w + i] + num[i] / den[i];
        }
        Ok(())
    }
}
