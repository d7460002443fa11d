//! Non-local means denoising for Rician-distributed MR magnitude images.
//!
//! The filter compares patches through a *similarity measure* that is either
//! the usual Gaussian kernel on intensity differences or one derived from the
//! noise likelihood (noncentral chi-square on `G = M²/σ²`, Rician on `M`).
//! Averaged values are then corrected for the noise floor by one of two
//! estimators.
//!
//! ```
//! use rnlm::{denoise, FilterSettings, Image, Domain, Pipeline};
//!
//! let noisy = Image::filled(32, 32, 10.0, Domain::Magnitude).unwrap();
//! let out = denoise(&noisy, Pipeline::Nlmr, 2.0, &FilterSettings::default()).unwrap();
//! assert_eq!(out.domain(), Domain::Amplitude);
//! ```

pub mod error;
pub mod image;
pub mod metrics;
pub mod nlm;
pub mod noise;
pub mod oracle;
pub mod phantom;
pub mod similarity;

pub use error::{Error, Result};
pub use image::{Domain, Image};
pub use metrics::{
    crmse_db, evaluate, rmse_db, ssim, Decibels, MetricsReport, SsimMap, SsimParams,
};
pub use nlm::{
    denoise, denoise_with, estimate_a1, estimate_a2, nlm_filter, nlm_weights, weighted_average,
    Estimator, FilterSettings, NlmParams, Pipeline, WeightField,
};
pub use noise::stream::{NoiseStream, GENERATOR_ID};
pub use noise::{m_to_g, rician_mean, rician_pdf, nccs_pdf, sample_rician, NoiseParams};
pub use phantom::{add_rician_noise, corrupt, generate_phantom, PhantomKind, PhantomSpec};
pub use similarity::bessel::{log_bessel_i0, log_bessel_i1};
pub use similarity::{MeasureKind, SimilarityMeasure};
