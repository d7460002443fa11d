//! Monte-Carlo experiment on the sign of the two bias-corrected squared
//! estimates, plus their analytic counterparts for pure noise.

use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::gamma::gamma_lr;

use crate::error::{check_sigma, Error, Result};
use crate::noise::stream::{namespace, NoiseStream};
use crate::noise::sample_rician;

/// Trials per substream. Fixed so results do not depend on the thread count.
pub const BLOCK_TRIALS: u64 = 1 << 14;

pub const DEFAULT_BINS: usize = 200;

/// Uniform bins on `[lo, hi)`; values outside are tallied in the edge bins.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramBins {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl HistogramBins {
    pub fn new(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::param("bins", format!("need lo < hi, got [{lo}, {hi}]")));
        }
        if count == 0 {
            return Err(Error::param("bins", "need at least one bin"));
        }
        Ok(HistogramBins { lo, hi, count })
    }

    /// Covers `[−2, F + 10·sd]`, `sd` the standard deviation of the mean of
    /// `n_avg` normalized squared magnitudes at `F = a²/σ²`.
    pub fn default_for(n_avg: usize, a: f64, sigma: f64) -> Self {
        let f = (a / sigma).powi(2);
        let sd = 2.0 * (f + 1.0).sqrt() / (n_avg as f64).sqrt();
        HistogramBins {
            lo: -2.0,
            hi: f + 10.0 * sd,
            count: DEFAULT_BINS,
        }
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.count as f64
    }

    pub fn edges(&self, i: usize) -> (f64, f64) {
        let w = self.width();
        (self.lo + w * i as f64, self.lo + w * (i + 1) as f64)
    }

    fn index(&self, v: f64) -> usize {
        let k = ((v - self.lo) / self.width()).floor();
        if k < 0.0 {
            0
        } else {
            (k as usize).min(self.count - 1)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistExperimentResult {
    /// Fraction of trials with `mean(g) − 2 ≤ 0`.
    pub p1_nonpos: f64,
    /// Fraction of trials with `mean(m)²/σ² − 2 ≤ 0`.
    pub p2_nonpos: f64,
    pub histogram1: Vec<u64>,
    pub histogram2: Vec<u64>,
    pub bins: HistogramBins,
    pub trials: u64,
    pub n_avg: usize,
    pub a: f64,
    pub sigma: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
struct Tally {
    nonpos1: u64,
    nonpos2: u64,
    h1: Vec<u64>,
    h2: Vec<u64>,
}

fn run_block(
    block: u64,
    trials: u64,
    n_avg: usize,
    a: f64,
    sigma: f64,
    seed: u64,
    bins: &HistogramBins,
) -> Tally {
    let mut stream = NoiseStream::new(seed, namespace::HIST_BLOCKS + block);
    let mut tally = Tally {
        nonpos1: 0,
        nonpos2: 0,
        h1: vec![0; bins.count],
        h2: vec![0; bins.count],
    };
    let n = n_avg as f64;
    for _ in 0..trials {
        let (mut sum_g, mut sum_m) = (0.0, 0.0);
        for _ in 0..n_avg {
            let m = sample_rician(a, sigma, &mut stream) / sigma;
            sum_m += m;
            sum_g += m * m;
        }
        let est1 = sum_g / n - 2.0;
        let mean_m = sum_m / n;
        let est2 = mean_m * mean_m - 2.0;
        tally.nonpos1 += u64::from(est1 <= 0.0);
        tally.nonpos2 += u64::from(est2 <= 0.0);
        tally.h1[bins.index(est1)] += 1;
        tally.h2[bins.index(est2)] += 1;
    }
    tally
}

/// Runs `trials` independent trials with the default binning.
pub fn hist_experiment(
    trials: u64,
    n_avg: usize,
    a: f64,
    sigma: f64,
    seed: u64,
) -> Result<HistExperimentResult> {
    check_sigma(sigma)?;
    hist_experiment_binned(
        trials,
        n_avg,
        a,
        sigma,
        seed,
        HistogramBins::default_for(n_avg, a, sigma),
    )
}

pub fn hist_experiment_binned(
    trials: u64,
    n_avg: usize,
    a: f64,
    sigma: f64,
    seed: u64,
    bins: HistogramBins,
) -> Result<HistExperimentResult> {
    if trials == 0 {
        return Err(Error::param("trials", "must be at least 1"));
    }
    if n_avg == 0 {
        return Err(Error::param("n_avg", "must be at least 1"));
    }
    check_sigma(sigma)?;
    if !(a.is_finite() && a >= 0.0) {
        return Err(Error::param("a", format!("must be finite and non-negative, got {a}")));
    }
    let blocks = trials.div_ceil(BLOCK_TRIALS);
    let tallies: Vec<Tally> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let len = BLOCK_TRIALS.min(trials - b * BLOCK_TRIALS);
            run_block(b, len, n_avg, a, sigma, seed, &bins)
        })
        .collect();

    let mut total = Tally {
        nonpos1: 0,
        nonpos2: 0,
        h1: vec![0; bins.count],
        h2: vec![0; bins.count],
    };
    for t in &tallies {
        total.nonpos1 += t.nonpos1;
        total.nonpos2 += t.nonpos2;
        for (acc, v) in total.h1.iter_mut().zip(&t.h1) {
            *acc += v;
        }
        for (acc, v) in total.h2.iter_mut().zip(&t.h2) {
            *acc += v;
        }
    }
    Ok(HistExperimentResult {
        p1_nonpos: total.nonpos1 as f64 / trials as f64,
        p2_nonpos: total.nonpos2 as f64 / trials as f64,
        histogram1: total.h1,
        histogram2: total.h2,
        bins,
        trials,
        n_avg,
        a,
        sigma,
        seed,
    })
}

/// `P(mean(g) ≤ 2)` for pure noise: `Σg ~ χ²` with `2n` degrees of freedom,
/// so the probability is the regularized lower gamma `P(n, n)`.
pub fn p1_nonpos_pure_noise(n_avg: usize) -> f64 {
    let n = n_avg as f64;
    gamma_lr(n, n)
}

/// Normal approximation of `P(mean(m) ≤ √2·σ)` for Rayleigh samples.
pub fn p2_nonpos_pure_noise_normal(n_avg: usize) -> f64 {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mean = half_pi.sqrt();
    let sd = ((2.0 - half_pi) / n_avg as f64).sqrt();
    Normal::new(mean, sd)
        .expect("positive standard deviation")
        .cdf(std::f64::consts::SQRT_2)
}
