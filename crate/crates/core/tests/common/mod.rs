//! Straightforward per-pixel NLM used as an oracle for the banded engine.

#![allow(dead_code)]

use rnlm::nlm::{mirror, LOG_WEIGHT_CEILING, WEIGHT_FLOOR};
use rnlm::{Image, NlmParams};

fn at(img: &Image, x: isize, y: isize) -> f64 {
    img.get(mirror(x, img.width()), mirror(y, img.height()))
}

/// Filters `img` pixel by pixel: clipped search window, mirrored patches.
pub fn naive_nlm(img: &Image, params: &NlmParams) -> Vec<f64> {
    let (w, h) = (img.width() as isize, img.height() as isize);
    let pr = params.settings.patch_radius() as isize;
    let sr = params.settings.search_radius() as isize;
    let beta = params.settings.beta();
    let side = 2 * pr + 1;
    let mut out = Vec::with_capacity(img.len());
    for sy in 0..h {
        for sx in 0..w {
            let centre = img.get(sx as usize, sy as usize);
            let (mut num, mut den) = (0.0, 0.0);
            for ty in (sy - sr).max(0)..=(sy + sr).min(h - 1) {
                for tx in (sx - sr).max(0)..=(sx + sr).min(w - 1) {
                    let mut acc = 0.0;
                    for oy in -pr..=pr {
                        for ox in -pr..=pr {
                            let b = beta[((oy + pr) * side + ox + pr) as usize];
                            let a = at(img, sx + ox, sy + oy);
                            let c = at(img, tx + ox, ty + oy);
                            acc += b * params.measure.log_value(a, c);
                        }
                    }
                    let mut wgt = (acc / params.settings.h()).min(LOG_WEIGHT_CEILING).exp();
                    if wgt < WEIGHT_FLOOR {
                        wgt = 0.0;
                    }
                    num += wgt * (img.get(tx as usize, ty as usize) - centre);
                    den += wgt;
                }
            }
            out.push(centre + num / den);
        }
    }
    out
}

/// Small deterministic pseudo-random image (SplitMix64).
pub fn random_image(w: usize, h: usize, seed: u64, scale: f64, domain: rnlm::Domain) -> Image {
    let mut state = seed;
    let px = (0..w * h)
        .map(|_| {
            state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^= z >> 31;
            (z >> 11) as f64 / (1u64 << 53) as f64 * scale
        })
        .collect();
    Image::new(w, h, px, domain).unwrap()
}
