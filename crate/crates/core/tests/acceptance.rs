//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

mod common;

use std::time::Instant;

use rayon::ThreadPoolBuilder;

use rnlm::noise::stream::namespace;
use rnlm::oracle::{
    hist_experiment, lawrence_identity_check, p1_nonpos_pure_noise, quad_csm, quad_rsm_rice,
    quad_ssm_nccs, CsmKind, HistExperimentResult, QuadratureConfig,
};
use rnlm::similarity::{snl1, snl2, snl3, snl4};
use rnlm::{
    add_rician_noise, denoise, evaluate, generate_phantom, nlm_filter, rician_mean, sample_rician,
    Domain, FilterSettings, Image, MeasureKind, NlmParams, NoiseStream, PhantomKind, PhantomSpec,
    Pipeline, SimilarityMeasure, SsimParams,
};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Outcome { pass, detail }
    }
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool")
        .install(f)
}

fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

// 1 -----------------------------------------------------------------------

fn run_hist() -> HistExperimentResult {
    hist_experiment(1_000_000, 25, 0.0, 1.0, 20_240_601).unwrap()
}

fn histogram(r: &HistExperimentResult, secs: f64) -> Outcome {
    let analytic = p1_nonpos_pure_noise(25);
    let pass = (0.51..=0.56).contains(&r.p1_nonpos)
        && (0.87..=0.91).contains(&r.p2_nonpos)
        && (r.p1_nonpos - analytic).abs() <= 0.005
        && secs <= 10.0;
    Outcome::new(
        pass,
        format!(
            "p1={:.4} p2={:.4} analytic p1={:.4} time={secs:.2}s",
            r.p1_nonpos, r.p2_nonpos, analytic
        ),
    )
}

// 2 -----------------------------------------------------------------------

const GRID: [(f64, f64); 20] = [
    (0.0, 0.0),
    (0.0, 0.5),
    (0.5, 2.0),
    (1.0, 1.0),
    (1.0, 4.0),
    (2.0, 3.0),
    (3.0, 5.0),
    (4.0, 4.0),
    (5.0, 8.0),
    (6.0, 7.0),
    (8.0, 10.0),
    (9.0, 12.0),
    (10.0, 10.0),
    (12.0, 15.0),
    (14.0, 16.0),
    (16.0, 20.0),
    (18.0, 19.0),
    (20.0, 25.0),
    (25.0, 27.0),
    (28.0, 30.0),
];

fn closed_vs_quadrature() -> Outcome {
    let cfg = QuadratureConfig {
        abs_tol: 1e-30,
        rel_tol: 1e-10,
        ..QuadratureConfig::default()
    };
    let mut worst = (0.0f64, String::new());
    let mut note = |e: f64, what: String| {
        if e > worst.0 || worst.1.is_empty() {
            worst = (e.max(worst.0), what);
        }
    };
    for &(s, t) in &GRID {
        note(
            rel_err(snl1(s, t).unwrap(), quad_ssm_nccs(s, t, &cfg).unwrap()),
            format!("snl1({s},{t})"),
        );
        note(
            rel_err(snl3(s, t).unwrap(), quad_csm(s, t, CsmKind::Nccs, &cfg).unwrap()),
            format!("snl3({s},{t})"),
        );
        for sigma in [0.5, 1.0, 2.0] {
            note(
                rel_err(snl2(s, t, sigma).unwrap(), quad_rsm_rice(s, t, sigma, &cfg).unwrap()),
                format!("snl2({s},{t},{sigma})"),
            );
            note(
                rel_err(
                    snl4(s, t, sigma).unwrap(),
                    quad_csm(s, t, CsmKind::Rice { sigma }, &cfg).unwrap(),
                ),
                format!("snl4({s},{t},{sigma})"),
            );
        }
    }
    Outcome::new(
        worst.0 <= 1e-6,
        format!("max relative error {:.2e} at {}", worst.0, worst.1),
    )
}

// 3 -----------------------------------------------------------------------

fn lawrence() -> Outcome {
    let grid = [
        (0.0, 0.0),
        (1.0, 2.0),
        (2.0, 7.0),
        (3.0, 3.0),
        (4.0, 9.0),
        (5.0, 5.0),
        (6.0, 1.0),
        (7.0, 10.0),
        (8.5, 4.0),
        (10.0, 10.0),
    ];
    let cfg = QuadratureConfig::default();
    let worst = grid
        .iter()
        .map(|&(a, b)| lawrence_identity_check(a, b, &cfg).unwrap())
        .fold(0.0f64, f64::max);
    Outcome::new(worst <= 1e-7, format!("max residual {worst:.2e}"))
}

// 4 -----------------------------------------------------------------------

fn reparametrization() -> Outcome {
    let mut rng = NoiseStream::new(4, namespace::GENERAL);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let ms = 30.0 * rng.uniform();
        let mt = 30.0 * rng.uniform();
        let sigma = 0.5 + 4.5 * rng.uniform();
        let a = snl4(ms, mt, sigma).unwrap();
        let b = snl3((ms / sigma).powi(2), (mt / sigma).powi(2)).unwrap();
        worst = worst.max((a - b).abs());
    }
    Outcome::new(worst <= 1e-12, format!("max |difference| {worst:.2e}"))
}

// 5 -----------------------------------------------------------------------

fn gaussian_limit() -> Outcome {
    let mut worst = 0.0f64;
    for sigma in [0.5, 1.0, 3.0] {
        for i in 0..100 {
            let lo = sigma * (10.0 + 90.0 * i as f64 / 99.0);
            for j in 0..100 {
                let d = sigma * (-3.0 + 6.0 * j as f64 / 99.0);
                let (ms, mt) = if d >= 0.0 { (lo, lo + d) } else { (lo - d, lo) };
                let exact = snl4(ms, mt, sigma).unwrap();
                let approx = (-(d * d) / (4.0 * sigma * sigma)).exp();
                worst = worst.max((exact - approx).abs());
            }
        }
    }
    Outcome::new(worst <= 0.01, format!("max |difference| {worst:.2e}"))
}

// 6 -----------------------------------------------------------------------

fn noise_statistics() -> Outcome {
    const N: usize = 1_000_000;
    let mut worst = 0.0f64;
    let mut details = Vec::new();
    for (k, f) in [0.0f64, 1.0, 9.0, 100.0].into_iter().enumerate() {
        let sigma = 1.0;
        let a = f.sqrt() * sigma;
        let mut stream = NoiseStream::new(6, namespace::GENERAL + k as u64);
        let (mut sg, mut sgg, mut sm, mut smm) = (0.0, 0.0, 0.0, 0.0);
        for _ in 0..N {
            let m = sample_rician(a, sigma, &mut stream);
            let g = (m / sigma).powi(2);
            sg += g;
            sgg += g * g;
            sm += m;
            smm += m * m;
        }
        let n = N as f64;
        let (mg, mm) = (sg / n, sm / n);
        let se_g = ((sgg / n - mg * mg) / n).sqrt();
        let se_m = ((smm / n - mm * mm) / n).sqrt();
        let zg = (mg - (f + 2.0)).abs() / se_g;
        let zm = (mm - rician_mean(a, sigma).unwrap()).abs() / se_m;
        worst = worst.max(zg).max(zm);
        details.push(format!("F={f}: zG={zg:.2} zM={zm:.2}"));
    }
    Outcome::new(worst <= 4.0, details.join(", "))
}

// 7 -----------------------------------------------------------------------

fn engine_outputs() -> Vec<Vec<u64>> {
    let mut all = Vec::new();
    for kind in MeasureKind::ALL {
        let scale = match kind.input_domain() {
            Domain::SquaredG => 10.0,
            _ => 8.0,
        };
        let params = NlmParams::with_settings(
            SimilarityMeasure::new(kind, 1.0).unwrap(),
            FilterSettings::default(),
        );
        for seed in 0..10 {
            let img = common::random_image(8, 8, 1000 + seed, scale, kind.input_domain());
            let out = nlm_filter(&img, &params).unwrap();
            all.push(out.pixels().iter().map(|v| v.to_bits()).collect());
        }
    }
    all
}

fn engine_equivalence() -> Outcome {
    let mut mismatches = 0;
    let mut compared = 0;
    for kind in MeasureKind::ALL {
        let scale = match kind.input_domain() {
            Domain::SquaredG => 10.0,
            _ => 8.0,
        };
        let params = NlmParams::with_settings(
            SimilarityMeasure::new(kind, 1.0).unwrap(),
            FilterSettings::default(),
        );
        for seed in 0..10 {
            let img = common::random_image(8, 8, 1000 + seed, scale, kind.input_domain());
            let fast = nlm_filter(&img, &params).unwrap();
            let slow = common::naive_nlm(&img, &params);
            compared += slow.len();
            mismatches += fast
                .pixels()
                .iter()
                .zip(&slow)
                .filter(|(a, b)| a.to_bits() != b.to_bits())
                .count();
        }
    }
    Outcome::new(
        mismatches == 0,
        format!("{mismatches} of {compared} pixels differ across {} measures", MeasureKind::ALL.len()),
    )
}

// 8 -----------------------------------------------------------------------

const SEEDS: [u64; 5] = [1, 2, 3, 4, 5];

struct Efficacy {
    /// Denoised images, for the determinism check.
    images: Vec<Vec<u64>>,
    noisy: [f64; 3],
    nlmr: [f64; 3],
    nlms: [f64; 3],
    slowest: f64,
}

fn efficacy_run() -> Efficacy {
    let truth = generate_phantom(&PhantomSpec::new(PhantomKind::SheppLogan, 256)).unwrap();
    let settings = FilterSettings::default();
    let ssim = SsimParams::default();
    let metrics = |est: &Image| {
        let r = evaluate(&truth, est, &ssim).unwrap();
        [r.rmse_db, r.crmse_db, r.ssim_mean]
    };
    let mut acc = Efficacy {
        images: Vec::new(),
        noisy: [0.0; 3],
        nlmr: [0.0; 3],
        nlms: [0.0; 3],
        slowest: 0.0,
    };
    let add = |sum: &mut [f64; 3], v: [f64; 3]| {
        for (s, x) in sum.iter_mut().zip(v) {
            *s += x / SEEDS.len() as f64;
        }
    };
    for seed in SEEDS {
        let (noisy, sigma) = add_rician_noise(&truth, 0.10, seed).unwrap();
        add(&mut acc.noisy, metrics(&noisy));
        for pipeline in [Pipeline::Nlmr, Pipeline::Nlms] {
            let start = Instant::now();
            let out = denoise(&noisy, pipeline, sigma, &settings).unwrap();
            acc.slowest = acc.slowest.max(start.elapsed().as_secs_f64());
            let m = metrics(&out);
            match pipeline {
                Pipeline::Nlmr => add(&mut acc.nlmr, m),
                _ => add(&mut acc.nlms, m),
            }
            acc.images
                .push(out.pixels().iter().map(|v| v.to_bits()).collect());
        }
    }
    acc
}

fn efficacy(e: &Efficacy) -> Outcome {
    let [n_rmse, n_crmse, n_ssim] = e.noisy;
    let [r_rmse, r_crmse, r_ssim] = e.nlmr;
    let s_ssim = e.nlms[2];
    let a = r_rmse <= n_rmse - 5.0;
    let b = r_ssim >= n_ssim + 0.3;
    let c = s_ssim < r_ssim;
    let d = n_rmse - n_crmse >= 0.5 && r_rmse - r_crmse <= 0.2;
    let t = e.slowest <= 60.0;
    let flag = |ok: bool| if ok { "ok" } else { "FAIL" };
    Outcome::new(
        a && b && c && d && t,
        format!(
            "(a) rmse noisy {n_rmse:.2} nlmr {r_rmse:.2} dB {}; (b) ssim noisy {n_ssim:.3} nlmr {r_ssim:.3} {}; \
             (c) ssim nlms {s_ssim:.3} {}; (d) gap noisy {:.2} nlmr {:.2} dB {}; slowest denoise {:.1}s {}",
            flag(a),
            flag(b),
            flag(c),
            n_rmse - n_crmse,
            r_rmse - r_crmse,
            flag(d),
            e.slowest,
            flag(t),
        ),
    )
}

// 9 -----------------------------------------------------------------------

fn determinism(hist1: &HistExperimentResult, engine1: &[Vec<u64>], eff1: &Efficacy) -> Outcome {
    let mut diffs = Vec::new();
    for threads in [4, 16] {
        if in_pool(threads, run_hist) != *hist1 {
            diffs.push(format!("hist@{threads}"));
        }
        if in_pool(threads, engine_outputs) != engine1 {
            diffs.push(format!("engine@{threads}"));
        }
        if in_pool(threads, efficacy_run).images != eff1.images {
            diffs.push(format!("denoise@{threads}"));
        }
    }
    Outcome::new(
        diffs.is_empty(),
        if diffs.is_empty() {
            "histogram, engine and denoise outputs identical at 1, 4, 16 threads".into()
        } else {
            format!("differences: {}", diffs.join(", "))
        },
    )
}

fn main() {
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    let mut report = |id: usize, name: &'static str, o: Outcome| {
        println!(
            "{} [{id}] {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        results.push((id, name, o));
    };

    let start = Instant::now();
    let hist1 = in_pool(1, run_hist);
    report(1, "histogram experiment", histogram(&hist1, start.elapsed().as_secs_f64()));
    report(2, "closed forms vs quadrature", closed_vs_quadrature());
    report(3, "Lawrence identity", lawrence());
    report(4, "reparametrization equivalence", reparametrization());
    report(5, "Gaussian limit", gaussian_limit());
    report(6, "noise-model statistics", noise_statistics());
    report(7, "engine vs naive reference", engine_equivalence());
    let engine1 = in_pool(1, engine_outputs);
    let eff1 = in_pool(1, efficacy_run);
    report(8, "denoising efficacy", efficacy(&eff1));
    report(9, "thread-count determinism", determinism(&hist1, &engine1, &eff1));

    let failed = results.iter().filter(|(_, _, o)| !o.pass).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
