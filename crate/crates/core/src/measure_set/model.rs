use serde::{Deserialize, Serialize};

use crate::densities::{MeanInterval, VarianceInterval};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelKind {
    /// X_i = μ_i + σ ε_i, μ_i ∈ [μ̲, μ̄] chosen by the adversary.
    MeanUncertain { interval: MeanInterval, sigma: f64 },
    /// X_i = σ_i ε_i, σ_i ∈ [σ̲, σ̄] chosen by the adversary.
    VarianceUncertain { interval: VarianceInterval },
}

/// Zero-mean, unit-variance innovation law with finite support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "kebab-case")]
pub enum Innovation {
    Rademacher,
    Discrete { values: Vec<f64>, probs: Vec<f64> },
}

impl Innovation {
    pub fn atoms(&self) -> Vec<(f64, f64)> {
        match self {
            Innovation::Rademacher => vec![(-1.0, 0.5), (1.0, 0.5)],
            Innovation::Discrete { values, probs } => values.iter().copied().zip(probs.iter().copied()).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Innovation::Discrete { values, probs } = self {
            if values.is_empty() || values.len() != probs.len() {
                return Err(Error::InvalidParams("innovation values/probs must be non-empty and of equal length".into()));
            }
            crate::martingale::check_probs(probs)?;
            let atoms = self.atoms();
            let mean: f64 = atoms.iter().map(|(v, p)| v * p).sum();
            let var: f64 = atoms.iter().map(|(v, p)| p * v * v).sum();
            if mean.abs() > 1e-12 || (var - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParams(format!(
                    "innovation must have mean 0 and variance 1, got mean {mean}, variance {var}"
                )));
            }
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.atoms().iter().map(|(v, _)| v.abs()).fold(0.0, f64::max)
    }
}

/// A parametric rectangular set of measures: an adversary picks the control at
/// every step after seeing the history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RectangularModel {
    #[serde(flatten)]
    pub kind: ModelKind,
    #[serde(default = "default_innovation")]
    pub innovation: Innovation,
    pub n: usize,
}

fn default_innovation() -> Innovation {
    Innovation::Rademacher
}

impl RectangularModel {
    pub fn new(kind: ModelKind, innovation: Innovation, n: usize) -> Result<Self> {
        let m = RectangularModel { kind, innovation, n };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParams("n must be at least 1".into()));
        }
        if let ModelKind::MeanUncertain { sigma, .. } = self.kind {
            if !(sigma > 0.0 && sigma.is_finite()) {
                return Err(Error::InvalidParams(format!("sigma must be positive, got {sigma}")));
            }
        }
        self.innovation.validate()
    }

    pub fn with_n(&self, n: usize) -> Self {
        RectangularModel { n, ..self.clone() }
    }

    /// Adversary control grid, ascending and de-duplicated.
    ///
    /// Mean case: five equally spaced points of [μ̲, μ̄]. Variance case: {σ̲, σ̄},
    /// or five equally spaced points when `enrich` is set.
    pub fn controls(&self, enrich: bool) -> Vec<f64> {
        let (lo, hi, count) = match self.kind {
            ModelKind::MeanUncertain { interval, .. } => (interval.low(), interval.high(), 5),
            ModelKind::VarianceUncertain { interval } => (interval.low(), interval.high(), if enrich { 5 } else { 2 }),
        };
        let mut out: Vec<f64> = (0..count)
            .map(|j| if j + 1 == count { hi } else { lo + (hi - lo) * j as f64 / (count - 1) as f64 })
            .collect();
        out.dedup();
        out
    }

    /// The increment X_i under control `u` and innovation `eps`.
    pub fn increment(&self, u: f64, eps: f64) -> f64 {
        match self.kind {
            ModelKind::MeanUncertain { sigma, .. } => u + sigma * eps,
            ModelKind::VarianceUncertain { .. } => u * eps,
        }
    }

    /// Change of the tracked statistic for one step.
    ///
    /// Variance case: S_m/√n moves by σ ε/√n. Mean case: the statistic
    /// (1/n)ΣX_i + (1/√n)Σ(X_i − μ_i)/σ moves by μ/n + (σ/n + 1/√n) ε.
    pub fn statistic_move(&self, u: f64, eps: f64) -> f64 {
        let n = self.n as f64;
        match self.kind {
            ModelKind::MeanUncertain { sigma, .. } => u / n + (sigma / n + 1.0 / n.sqrt()) * eps,
            ModelKind::VarianceUncertain { .. } => u * eps / n.sqrt(),
        }
    }

    /// Innovation scale per step: σ̲/√n, or σ/n + 1/√n.
    pub fn base_spacing(&self) -> f64 {
        let n = self.n as f64;
        match self.kind {
            ModelKind::MeanUncertain { sigma, .. } => sigma / n + 1.0 / n.sqrt(),
            ModelKind::VarianceUncertain { interval } => interval.low() / n.sqrt(),
        }
    }

    /// L = |c| + 8σ̄, or |c| + 8 + |μ̄| + |μ̲|.
    pub fn halfwidth(&self, center: f64) -> f64 {
        match self.kind {
            ModelKind::MeanUncertain { interval, .. } => center.abs() + 8.0 + interval.high().abs() + interval.low().abs(),
            ModelKind::VarianceUncertain { interval } => center.abs() + 8.0 * interval.high(),
        }
    }

    /// Smallest q making every control move a whole number of cells of width
    /// base/q (variance case; 1 in the mean case or when none exists up to 64).
    pub fn lattice_denominator(&self, enrich: bool) -> usize {
        let ModelKind::VarianceUncertain { interval } = self.kind else {
            return 1;
        };
        let ratios: Vec<f64> = self.controls(enrich).iter().map(|s| s / interval.low()).collect();
        (1..=64usize)
            .find(|&q| {
                ratios.iter().all(|r| {
                    let m = r * q as f64;
                    (m - m.round()).abs() <= 1e-9 * m.max(1.0)
                })
            })
            .unwrap_or(1)
    }

    /// Whether `u` lies in the control interval.
    pub fn admits(&self, u: f64) -> bool {
        let (lo, hi) = match self.kind {
            ModelKind::MeanUncertain { interval, .. } => (interval.low(), interval.high()),
            ModelKind::VarianceUncertain { interval } => (interval.low(), interval.high()),
        };
        u >= lo && u <= hi
    }
}
