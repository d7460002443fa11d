//! Non-local means filtering of Rician magnitude images.
//!
//! Three pipelines are provided:
//!
//! | pipeline | weights from              | averaged | bias removal |
//! |----------|---------------------------|----------|--------------|
//! | `Gnlm`   | Gaussian limit on `M`     | `M`      | `√max(m̄² − 2σ², 0)` |
//! | `Nlms`   | `Snl3` on `G = (M/σ)²`    | `G`      | `σ√max(ḡ − 2, 0)` |
//! | `Nlmr`   | `Snl4` on `M`             | `M`      | `√max(m̄² − 2σ², 0)` |

mod engine;
mod params;

pub use engine::{
    mirror, nlm_filter, nlm_weights, patch_log_similarity, weighted_average, WeightField,
    LOG_WEIGHT_CEILING, WEIGHT_FLOOR,
};
pub use params::{binomial_kernel, Estimator, FilterSettings, NlmParams};

use crate::error::{check_sigma, Error, Result};
use crate::image::{Domain, Image};
use crate::noise::m_to_g;
use crate::similarity::{MeasureKind, SimilarityMeasure};

/// `σ·√max(ḡ − 2, 0)`.
#[inline]
pub fn estimate_a1(g_avg: f64, sigma: f64) -> f64 {
    sigma * (g_avg - 2.0).max(0.0).sqrt()
}

/// `√max(m̄² − 2σ², 0)`, factored so the boundary `m̄ = √2·σ` maps to 0 exactly.
#[inline]
pub fn estimate_a2(m_avg: f64, sigma: f64) -> f64 {
    let floor = std::f64::consts::SQRT_2 * sigma;
    if m_avg <= floor {
        return 0.0;
    }
    ((m_avg - floor) * (m_avg + floor)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pipeline {
    Gnlm,
    Nlms,
    Nlmr,
}

impl Pipeline {
    pub const ALL: [Pipeline; 3] = [Pipeline::Gnlm, Pipeline::Nlms, Pipeline::Nlmr];

    pub fn measure_kind(self) -> MeasureKind {
        match self {
            Pipeline::Gnlm => MeasureKind::GaussLimit,
            Pipeline::Nlms => MeasureKind::Snl3,
            Pipeline::Nlmr => MeasureKind::Snl4,
        }
    }

    pub fn input_domain(self) -> Domain {
        self.measure_kind().input_domain()
    }

    pub fn estimator(self) -> Estimator {
        match self {
            Pipeline::Nlms => Estimator::SquaredDomain,
            Pipeline::Gnlm | Pipeline::Nlmr => Estimator::MagnitudeDomain,
        }
    }

    pub fn params(self, sigma: f64, settings: FilterSettings) -> Result<NlmParams> {
        Ok(NlmParams {
            settings,
            measure: SimilarityMeasure::new(self.measure_kind(), sigma)?,
            estimator: self.estimator(),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Pipeline::Gnlm => "gnlm",
            Pipeline::Nlms => "nlms",
            Pipeline::Nlmr => "nlmr",
        }
    }
}

impl std::str::FromStr for Pipeline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Pipeline::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::param("method", format!("unknown method `{s}`")))
    }
}

/// Denoises a magnitude image with one of the named pipelines.
pub fn denoise(
    img: &Image,
    pipeline: Pipeline,
    sigma: f64,
    settings: &FilterSettings,
) -> Result<Image> {
    let params = pipeline.params(sigma, settings.clone())?;
    denoise_with(img, &params)
}

/// Denoises a magnitude image with an arbitrary measure/estimator pairing.
///
/// Weights are computed in the measure's domain; the averaged field is the
/// estimator's domain (`G` for [`Estimator::SquaredDomain`], `M` otherwise).
pub fn denoise_with(img: &Image, params: &NlmParams) -> Result<Image> {
    img.expect_domain(Domain::Magnitude)?;
    let sigma = params.measure.sigma();
    check_sigma(sigma)?;
    let g = if params.measure.kind().input_domain() == Domain::SquaredG
        || params.estimator == Estimator::SquaredDomain
    {
        Some(m_to_g(img, sigma)?)
    } else {
        None
    };
    let weight_source = match params.measure.kind().input_domain() {
        Domain::SquaredG => g.as_ref().expect("converted above"),
        _ => img,
    };
    let (values, estimate): (&Image, fn(f64, f64) -> f64) = match params.estimator {
        Estimator::SquaredDomain => (g.as_ref().expect("converted above"), estimate_a1),
        Estimator::MagnitudeDomain => (img, estimate_a2),
    };
    let averaged = weighted_average(weight_source, values, params)?;
    Ok(averaged.map(Domain::Amplitude, |v| estimate(v, sigma)))
}
