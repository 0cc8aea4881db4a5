use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Parameters (α, β, c) shared by both explicit densities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityParams {
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
}

impl DensityParams {
    pub fn new(alpha: f64, beta: f64, c: f64) -> Self {
        DensityParams { alpha, beta, c }
    }
}

/// Conditional-mean interval [μ̲, μ̄].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanInterval {
    mu_low: f64,
    mu_high: f64,
}

impl MeanInterval {
    pub fn new(mu_low: f64, mu_high: f64) -> Result<Self> {
        if !(mu_low.is_finite() && mu_high.is_finite()) || mu_low > mu_high {
            return Err(Error::InvalidParams(format!(
                "MeanInterval requires mu_low <= mu_high, got [{mu_low}, {mu_high}]"
            )));
        }
        Ok(MeanInterval { mu_low, mu_high })
    }

    pub fn low(&self) -> f64 {
        self.mu_low
    }

    pub fn high(&self) -> f64 {
        self.mu_high
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.mu_low + self.mu_high)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.mu_high - self.mu_low)
    }

    pub fn max_abs(&self) -> f64 {
        self.mu_low.abs().max(self.mu_high.abs())
    }
}

/// Conditional standard-deviation interval [σ̲, σ̄] (variances [σ̲², σ̄²]).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceInterval {
    sigma_low: f64,
    sigma_high: f64,
}

impl VarianceInterval {
    pub fn new(sigma_low: f64, sigma_high: f64) -> Result<Self> {
        if !(sigma_low.is_finite() && sigma_high.is_finite()) || !(sigma_low > 0.0) || sigma_low > sigma_high {
            return Err(Error::InvalidParams(format!(
                "VarianceInterval requires 0 < sigma_low <= sigma_high, got [{sigma_low}, {sigma_high}]"
            )));
        }
        Ok(VarianceInterval { sigma_low, sigma_high })
    }

    pub fn low(&self) -> f64 {
        self.sigma_low
    }

    pub fn high(&self) -> f64 {
        self.sigma_high
    }

    /// θ = σ̲/σ̄ ∈ (0, 1].
    pub fn theta(&self) -> f64 {
        self.sigma_low / self.sigma_high
    }

    pub fn is_degenerate(&self) -> bool {
        self.sigma_low == self.sigma_high
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Sup,
    Inf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Monotonicity {
    Increasing,
    Decreasing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convexity {
    Concave,
    Convex,
}

/// Which S-shaped construction a terminal came from: φ (θ-compressed left branch)
/// or φ̄ (1/θ-stretched left branch).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Envelope {
    Phi,
    Phibar,
}

/// Density parameters for the mean-uncertainty limit of a symmetric test function
/// centred at `c` that is monotone on (c, ∞).
pub fn select_mean_limit_params(
    m: &MeanInterval,
    c: f64,
    monotone_on_right: Monotonicity,
    side: Side,
) -> DensityParams {
    let spread = m.half_width();
    let alpha = match (monotone_on_right, side) {
        (Monotonicity::Increasing, Side::Sup) | (Monotonicity::Decreasing, Side::Inf) => spread,
        (Monotonicity::Increasing, Side::Inf) | (Monotonicity::Decreasing, Side::Sup) => -spread,
    };
    // `+ 0.0` folds a negative zero from a degenerate interval.
    DensityParams::new(alpha + 0.0, m.midpoint(), c)
}

/// Density parameters for the variance-uncertainty limit of an S-shaped terminal.
///
/// Only the four (convexity, side, envelope) pairings covered by the limit theorem
/// are accepted; a degenerate interval always yields (σ, σ, c).
pub fn select_variance_limit_params(
    v: &VarianceInterval,
    c: f64,
    convexity_on_right: Convexity,
    side: Side,
    envelope: Envelope,
) -> Result<DensityParams> {
    let (lo, hi) = (v.low(), v.high());
    if v.is_degenerate() {
        return Ok(DensityParams::new(lo, lo, c));
    }
    use Convexity::*;
    use Envelope::*;
    match (convexity_on_right, side, envelope) {
        (Concave, Side::Sup, Phibar) | (Convex, Side::Inf, Phibar) => Ok(DensityParams::new(lo, hi, c)),
        (Concave, Side::Inf, Phi) | (Convex, Side::Sup, Phi) => Ok(DensityParams::new(hi, lo, c)),
        other => Err(Error::UnsupportedCombination(format!(
            "no explicit variance-uncertainty limit for (convexity, side, envelope) = {other:?}"
        ))),
    }
}
