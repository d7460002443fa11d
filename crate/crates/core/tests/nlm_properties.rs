//! Behavioural properties of the filter and the denoising pipelines.

mod common;

use rayon::ThreadPoolBuilder;

use rnlm::nlm::{mirror, patch_log_similarity};
use rnlm::{
    corrupt, denoise, m_to_g, nlm_filter, nlm_weights, Domain, FilterSettings, Image,
    MeasureKind, NlmParams, PhantomKind, PhantomSpec, Pipeline, SimilarityMeasure,
};

fn params(kind: MeasureKind, sigma: f64, settings: FilterSettings) -> NlmParams {
    NlmParams::with_settings(SimilarityMeasure::new(kind, sigma).unwrap(), settings)
}

#[test]
fn flat_phantom_is_recovered() {
    let (c, sigma) = (200.0, 10.0);
    let flat = rnlm::generate_phantom(&PhantomSpec::new(PhantomKind::Flat(c), 64)).unwrap();
    for seed in 0..3 {
        let noisy = corrupt(&flat, sigma, seed).unwrap();
        for p in Pipeline::ALL {
            let out = denoise(&noisy, p, sigma, &FilterSettings::default()).unwrap();
            assert!(
                out.pixels().iter().all(|v| (c - 3.0 * sigma..=c + 3.0 * sigma).contains(v)),
                "{p:?} seed {seed}"
            );
            let mean = out.pixels().iter().sum::<f64>() / out.len() as f64;
            assert!((mean - c).abs() <= sigma / 2.0, "{p:?} seed {seed}: mean {mean}");
        }
    }
}

fn box_average(img: &Image, r: usize) -> Vec<f64> {
    let (w, h) = (img.width(), img.height());
    let mut out = Vec::with_capacity(img.len());
    for y in 0..h {
        for x in 0..w {
            let (mut s, mut n) = (0.0, 0.0);
            for ty in y.saturating_sub(r)..=(y + r).min(h - 1) {
                for tx in x.saturating_sub(r)..=(x + r).min(w - 1) {
                    s += img.get(tx, ty);
                    n += 1.0;
                }
            }
            out.push(s / n);
        }
    }
    out
}

#[test]
fn large_h_tends_to_box_average() {
    for kind in [MeasureKind::Snl3, MeasureKind::Snl4, MeasureKind::GaussLimit] {
        let img = common::random_image(20, 16, 3, 10.0, kind.input_domain());
        let range = img.max() - img.min();
        let p = params(kind, 2.0, FilterSettings::new(2, 3, 1e3).unwrap());
        let out = nlm_filter(&img, &p).unwrap();
        let boxed = box_average(&img, 3);
        let worst = out
            .pixels()
            .iter()
            .zip(&boxed)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-3 * range, "{kind:?}: {worst}");
    }
}

#[test]
fn small_h_returns_the_input() {
    for kind in [MeasureKind::Snl3, MeasureKind::Snl4] {
        let img = common::random_image(20, 16, 4, 10.0, kind.input_domain());
        let range = img.max() - img.min();
        let p = params(kind, 2.0, FilterSettings::new(2, 5, 1e-3).unwrap());
        let out = nlm_filter(&img, &p).unwrap();
        let worst = out
            .pixels()
            .iter()
            .zip(img.pixels())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-3 * range, "{kind:?}: {worst}");
    }
}

#[test]
fn high_snr_rician_weights_match_gaussian_limit() {
    let sigma = 1.0;
    let raw = common::random_image(16, 16, 5, 6.0, Domain::Magnitude);
    let px = raw.pixels().iter().map(|v| 10.0 * sigma + v).collect();
    let img = Image::new(16, 16, px, Domain::Magnitude).unwrap();
    let settings = FilterSettings::default();
    let exact = params(MeasureKind::Snl4, sigma, settings.clone());
    let limit = params(MeasureKind::GaussLimit, sigma, settings);
    let mut compared = 0;
    for &s in &[(0, 0), (7, 8), (15, 3), (10, 15)] {
        let a = nlm_weights(&img, s, &exact).unwrap();
        let b = nlm_weights(&img, s, &limit).unwrap();
        assert_eq!(a.targets, b.targets);
        for (wa, wb) in a.weights.iter().zip(&b.weights) {
            if *wa == 0.0 && *wb == 0.0 {
                continue;
            }
            assert!((wa / wb - 1.0).abs() <= 0.02, "{wa} vs {wb}");
            compared += 1;
        }
    }
    assert!(compared > 100);
}

#[test]
fn denoising_is_thread_count_independent() {
    let flat = rnlm::generate_phantom(&PhantomSpec::new(PhantomKind::Disks, 48)).unwrap();
    let noisy = corrupt(&flat, 20.0, 9).unwrap();
    let run = |threads: usize, p: Pipeline| {
        ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| denoise(&noisy, p, 20.0, &FilterSettings::default()).unwrap())
    };
    for p in Pipeline::ALL {
        let serial = run(1, p);
        for threads in [2, 5] {
            let par = run(threads, p);
            assert!(
                serial
                    .pixels()
                    .iter()
                    .zip(par.pixels())
                    .all(|(a, b)| a.to_bits() == b.to_bits()),
                "{p:?} at {threads} threads"
            );
        }
    }
}

#[test]
fn toy_patch_walk_matches_direct_sum() {
    let img = Image::new(
        3,
        3,
        vec![0.0, 1.0, 4.0, 2.0, 9.0, 3.0, 5.0, 0.5, 7.0],
        Domain::SquaredG,
    )
    .unwrap();
    let p = params(MeasureKind::Snl3, 1.0, FilterSettings::new(1, 1, 0.4).unwrap());
    let beta = p.settings.beta();
    for &(s, t) in &[((0, 0), (2, 2)), ((1, 1), (0, 2)), ((2, 0), (1, 0))] {
        let mut direct = 0.0;
        for oy in -1isize..=1 {
            for ox in -1isize..=1 {
                let at = |q: (usize, usize)| {
                    img.get(
                        mirror(q.0 as isize + ox, 3),
                        mirror(q.1 as isize + oy, 3),
                    )
                };
                let b = beta[((oy + 1) * 3 + ox + 1) as usize];
                direct += b * rnlm::similarity::snl3(at(s), at(t)).unwrap().ln();
            }
        }
        let got = patch_log_similarity(&img, s, t, &p).unwrap();
        assert!((got - direct).abs() <= 1e-12, "{s:?}->{t:?}: {got} vs {direct}");
    }
}

#[test]
fn weights_normalize_everywhere() {
    let img = common::random_image(12, 10, 6, 30.0, Domain::Magnitude);
    let g = m_to_g(&img, 5.0).unwrap();
    let settings = FilterSettings::default();
    for (image, kind) in [(&img, MeasureKind::Snl4), (&g, MeasureKind::Snl3)] {
        let p = params(kind, 5.0, settings.clone());
        for y in 0..image.height() {
            for x in 0..image.width() {
                let f = nlm_weights(image, (x, y), &p).unwrap();
                let total: f64 = f.normalized().iter().sum();
                assert!((total - 1.0).abs() <= 1e-10);
            }
        }
    }
}
