use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A finitely supported law for iid summands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "kebab-case")]
pub enum IidLaw {
    Bernoulli { p: f64 },
    Rademacher,
    Discrete { values: Vec<f64>, probs: Vec<f64> },
}

impl IidLaw {
    pub fn validate(&self) -> Result<()> {
        match self {
            IidLaw::Bernoulli { p } if !(*p > 0.0 && *p < 1.0) => {
                Err(Error::InvalidParams(format!("Bernoulli p must lie in (0, 1), got {p}")))
            }
            IidLaw::Discrete { values, probs } => {
                if values.is_empty() || values.len() != probs.len() {
                    return Err(Error::InvalidParams("discrete law needs matching, non-empty values/probs".into()));
                }
                if probs.iter().any(|p| !(*p >= 0.0)) || values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidParams("discrete law needs finite values and probs >= 0".into()));
                }
                let total: f64 = probs.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidParams(format!("probabilities must sum to 1, got {total}")));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// (value, probability) atoms.
    pub fn support(&self) -> Vec<(f64, f64)> {
        match self {
            IidLaw::Bernoulli { p } => vec![(0.0, 1.0 - p), (1.0, *p)],
            IidLaw::Rademacher => vec![(-1.0, 0.5), (1.0, 0.5)],
            IidLaw::Discrete { values, probs } => values.iter().copied().zip(probs.iter().copied()).collect(),
        }
    }

    pub fn mean(&self) -> f64 {
        self.support().iter().map(|(x, p)| x * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.support().iter().map(|(x, p)| p * (x - mu) * (x - mu)).sum()
    }

    /// E|X − EX|^order.
    pub fn abs_central_moment(&self, order: f64) -> f64 {
        let mu = self.mean();
        self.support().iter().map(|(x, p)| p * (x - mu).abs().powf(order)).sum()
    }
}

/// Iid summands with the 2+δ moment order used by the Lyapunov condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IidModel {
    pub law: IidLaw,
    pub delta: f64,
}

impl IidModel {
    pub fn new(law: IidLaw, delta: f64) -> Result<Self> {
        law.validate()?;
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::InvalidParams(format!("delta must be positive, got {delta}")));
        }
        Ok(IidModel { law, delta })
    }

    pub fn rademacher(delta: f64) -> Self {
        IidModel { law: IidLaw::Rademacher, delta }
    }
}
