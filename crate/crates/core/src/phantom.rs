//! Synthetic amplitude images and simulated Rician acquisition.

use rayon::prelude::*;

use crate::error::{check_sigma, Error, Result};
use crate::image::{Domain, Image};
use crate::noise::stream::namespace;
use crate::noise::{sample_rician, NoiseStream};

pub const MIN_SIZE: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhantomKind {
    /// Shepp–Logan head with its original intensities: soft tissue at about
    /// half the skull intensity, internal structures at 1–2% contrast.
    SheppLogan,
    /// High-contrast variant: soft tissue at 20% of the skull, structures at 10%.
    ModifiedSheppLogan,
    /// Disks of several intensities on a zero background.
    Disks,
    /// Horizontal linear ramp from 0 to the maximum.
    Ramp,
    /// Constant image.
    Flat(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhantomSpec {
    pub kind: PhantomKind,
    pub size: usize,
    pub intensity_max: f64,
}

impl PhantomSpec {
    pub fn new(kind: PhantomKind, size: usize) -> Self {
        PhantomSpec {
            kind,
            size,
            intensity_max: 255.0,
        }
    }
}

/// Ellipses as (original intensity, modified intensity, semi-axis a,
/// semi-axis b, x0, y0, rotation in degrees). The original intensities peak
/// at 2 on the skull; the modified (high-contrast) ones peak at 1.
const SHEPP_LOGAN: [(f64, f64, f64, f64, f64, f64, f64); 10] = [
    (2.0, 1.0, 0.69, 0.92, 0.0, 0.0, 0.0),
    (-0.98, -0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0),
    (-0.02, -0.2, 0.11, 0.31, 0.22, 0.0, -18.0),
    (-0.02, -0.2, 0.16, 0.41, -0.22, 0.0, 18.0),
    (0.01, 0.1, 0.21, 0.25, 0.0, 0.35, 0.0),
    (0.01, 0.1, 0.046, 0.046, 0.0, 0.1, 0.0),
    (0.01, 0.1, 0.046, 0.046, 0.0, -0.1, 0.0),
    (0.01, 0.1, 0.046, 0.023, -0.08, -0.605, 0.0),
    (0.01, 0.1, 0.023, 0.023, 0.0, -0.606, 0.0),
    (0.01, 0.1, 0.023, 0.046, 0.06, -0.605, 0.0),
];

/// (relative intensity, radius, x0, y0) in the `[−1, 1]²` frame.
const DISKS: [(f64, f64, f64, f64); 5] = [
    (0.5, 0.45, 0.0, 0.0),
    (1.0, 0.15, -0.55, 0.55),
    (0.25, 0.2, 0.5, 0.5),
    (0.75, 0.12, 0.55, -0.55),
    (0.4, 0.18, -0.5, -0.5),
];

/// Intensity relative to the skull, so the result peaks at 1.
fn shepp_logan_at(x: f64, y: f64, modified: bool) -> f64 {
    let mut v = 0.0;
    for &(original, high_contrast, a, b, x0, y0, deg) in &SHEPP_LOGAN {
        let value = if modified {
            high_contrast
        } else {
            original / 2.0
        };
        let (s, c) = deg.to_radians().sin_cos();
        let (dx, dy) = (x - x0, y - y0);
        let u = dx * c + dy * s;
        let w = -dx * s + dy * c;
        if (u / a).powi(2) + (w / b).powi(2) <= 1.0 {
            v += value;
        }
    }
    v.max(0.0)
}

fn disks_at(x: f64, y: f64) -> f64 {
    // Later disks are painted over earlier ones.
    let mut v = 0.0;
    for &(value, r, x0, y0) in &DISKS {
        if (x - x0).powi(2) + (y - y0).powi(2) <= r * r {
            v = value;
        }
    }
    v
}

/// Deterministic analytic phantom in the amplitude domain.
pub fn generate_phantom(spec: &PhantomSpec) -> Result<Image> {
    let n = spec.size;
    if n < MIN_SIZE {
        return Err(Error::param("size", format!("must be >= {MIN_SIZE}, got {n}")));
    }
    let max = spec.intensity_max;
    if !(max.is_finite() && max > 0.0) {
        return Err(Error::param("intensity_max", format!("must be > 0, got {max}")));
    }
    // Pixel centres on [−1, 1]², y pointing up.
    let coord = |i: usize| (2 * i + 1) as f64 / n as f64 - 1.0;
    let pixels: Vec<f64> = match spec.kind {
        PhantomKind::Flat(value) => {
            if !(value.is_finite() && (0.0..=max).contains(&value)) {
                return Err(Error::param(
                    "value",
                    format!("flat value must lie in [0, {max}], got {value}"),
                ));
            }
            vec![value; n * n]
        }
        PhantomKind::Ramp => (0..n * n)
            .map(|i| max * (i % n) as f64 / (n - 1) as f64)
            .collect(),
        PhantomKind::SheppLogan => (0..n * n)
            .map(|i| max * shepp_logan_at(coord(i % n), -coord(i / n), false))
            .collect(),
        PhantomKind::ModifiedSheppLogan => (0..n * n)
            .map(|i| max * shepp_logan_at(coord(i % n), -coord(i / n), true))
            .collect(),
        PhantomKind::Disks => (0..n * n)
            .map(|i| max * disks_at(coord(i % n), -coord(i / n)))
            .collect(),
    };
    Image::new(n, n, pixels, Domain::Amplitude)
}

/// Corrupts an amplitude image with Rician noise of level `sigma`.
///
/// Row `y` draws from its own substream of `seed`, pixels left to right.
pub fn corrupt(img: &Image, sigma: f64, seed: u64) -> Result<Image> {
    img.expect_domain(Domain::Amplitude)?;
    check_sigma(sigma)?;
    let w = img.width();
    let mut out = vec![0.0; img.len()];
    out.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        let mut stream = NoiseStream::new(seed, namespace::PHANTOM_ROWS + y as u64);
        let src = &img.pixels()[y * w..(y + 1) * w];
        for (o, &a) in row.iter_mut().zip(src) {
            *o = sample_rician(a, sigma, &mut stream);
        }
    });
    Image::new(w, img.height(), out, Domain::Magnitude)
}

/// Corrupts with `σ = sigma_frac · max(img)`; returns the noisy image and `σ`.
pub fn add_rician_noise(img: &Image, sigma_frac: f64, seed: u64) -> Result<(Image, f64)> {
    if !(sigma_frac > 0.0 && sigma_frac < 1.0) {
        return Err(Error::param(
            "sigma_frac",
            format!("must lie in (0, 1), got {sigma_frac}"),
        ));
    }
    let max = img.max();
    if max <= 0.0 {
        return Err(Error::param("image", "all-zero image leaves sigma undefined"));
    }
    let sigma = sigma_frac * max;
    Ok((corrupt(img, sigma, seed)?, sigma))
}
