use crate::error::{Error, Result};
use crate::similarity::SimilarityMeasure;

/// How the averaged field is mapped back to an amplitude estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Estimator {
    /// Average `G`, then `σ·√max(ḡ − 2, 0)`.
    SquaredDomain,
    /// Average `M`, then `√max(m̄² − 2σ², 0)`.
    MagnitudeDomain,
}

/// Separable binomial patch kernel of side `2r + 1`, normalized to unit sum.
///
/// For `r = 2` this is `v vᵀ` with `v = [1 4 6 4 1] / 16`.
pub fn binomial_kernel(patch_radius: usize) -> Vec<f64> {
    let n = 2 * patch_radius + 1;
    let mut row = vec![1.0f64; n];
    for i in 1..n {
        row[i] = row[i - 1] * (n - i) as f64 / i as f64;
    }
    let total: f64 = row.iter().sum();
    let v: Vec<f64> = row.iter().map(|c| c / total).collect();
    let mut kernel = Vec::with_capacity(n * n);
    for a in &v {
        for b in &v {
            kernel.push(a * b);
        }
    }
    kernel
}

/// Geometry and smoothing of the filter, independent of the similarity measure.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterSettings {
    patch_radius: usize,
    search_radius: usize,
    h: f64,
    beta: Vec<f64>,
}

impl Default for FilterSettings {
    /// 5×5 binomial patch, 11×11 search window, `h = 0.4`.
    fn default() -> Self {
        FilterSettings {
            patch_radius: 2,
            search_radius: 5,
            h: 0.4,
            beta: binomial_kernel(2),
        }
    }
}

impl FilterSettings {
    /// Binomial patch kernel of the given radius.
    ///
    /// Values of `h` in roughly `[1/3, 1/2]` work best for the correlation
    /// measures at the default geometry.
    pub fn new(patch_radius: usize, search_radius: usize, h: f64) -> Result<Self> {
        Self::with_beta(patch_radius, search_radius, h, binomial_kernel(patch_radius))
    }

    pub fn with_beta(
        patch_radius: usize,
        search_radius: usize,
        h: f64,
        beta: Vec<f64>,
    ) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::param("h", format!("must be finite and > 0, got {h}")));
        }
        let side = 2 * patch_radius + 1;
        if beta.len() != side * side {
            return Err(Error::param(
                "beta",
                format!("expected {} entries for radius {patch_radius}, got {}", side * side, beta.len()),
            ));
        }
        if beta.iter().any(|b| !(b.is_finite() && *b >= 0.0)) {
            return Err(Error::param("beta", "entries must be finite and non-negative"));
        }
        let sum: f64 = beta.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::param("beta", format!("must sum to 1, sums to {sum}")));
        }
        let n = beta.len();
        if (0..n).any(|i| beta[i] != beta[n - 1 - i]) {
            return Err(Error::param("beta", "must be centrally symmetric"));
        }
        Ok(FilterSettings {
            patch_radius,
            search_radius,
            h,
            beta,
        })
    }

    pub fn patch_radius(&self) -> usize {
        self.patch_radius
    }

    pub fn search_radius(&self) -> usize {
        self.search_radius
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Row-major kernel over patch offsets `(oy, ox)`, `oy, ox ∈ [−r, r]`.
    pub fn beta(&self) -> &[f64] {
        &self.beta
    }
}

/// Full filter configuration: geometry, similarity measure and estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct NlmParams {
    pub settings: FilterSettings,
    pub measure: SimilarityMeasure,
    pub estimator: Estimator,
}

impl NlmParams {
    /// Default geometry; the estimator follows the measure's input domain.
    pub fn new(measure: SimilarityMeasure) -> Self {
        Self::with_settings(measure, FilterSettings::default())
    }

    pub fn with_settings(measure: SimilarityMeasure, settings: FilterSettings) -> Self {
        let estimator = match measure.kind().input_domain() {
            crate::image::Domain::SquaredG => Estimator::SquaredDomain,
            _ => Estimator::MagnitudeDomain,
        };
        NlmParams {
            settings,
            measure,
            estimator,
        }
    }
}
