use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::numerics::{cumulative, draw_index};
use crate::{Error, Result};

/// Martingale-difference models. Every increment is σ_i·ξ_i with ξ_i a fair sign
/// independent of the past, so the one-step conditional law is ±σ_i with mass ½.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MdsKind {
    IidRademacher,
    /// σ_i ≡ η for a scale η drawn once per path (F_0-measurable).
    HallMixture { eta_values: Vec<f64>, eta_probs: Vec<f64> },
    /// σ_1 = init, then σ_{i+1} = pos after a positive increment and neg otherwise.
    VarFeedback { init: f64, pos: f64, neg: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdsModel {
    #[serde(flatten)]
    pub kind: MdsKind,
    pub n: usize,
}

/// What the past reveals about the next increment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathState {
    pub sigma: f64,
}

impl MdsKind {
    pub fn validate(&self) -> Result<()> {
        match self {
            MdsKind::IidRademacher => Ok(()),
            MdsKind::HallMixture { eta_values, eta_probs } => {
                if eta_values.is_empty() || eta_values.len() != eta_probs.len() {
                    return Err(Error::InvalidParams("eta_values and eta_probs must be non-empty and of equal length".into()));
                }
                if eta_values.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
                    return Err(Error::InvalidParams("eta_values must be positive".into()));
                }
                check_probs(eta_probs)
            }
            MdsKind::VarFeedback { init, pos, neg } => {
                if [init, pos, neg].iter().any(|s| !(**s > 0.0 && s.is_finite())) {
                    return Err(Error::InvalidParams("var_feedback scales must be positive".into()));
                }
                Ok(())
            }
        }
    }

    /// Initial states with their probabilities.
    pub fn initial_states(&self) -> Vec<(PathState, f64)> {
        match self {
            MdsKind::IidRademacher => vec![(PathState { sigma: 1.0 }, 1.0)],
            MdsKind::HallMixture { eta_values, eta_probs } => eta_values
                .iter()
                .zip(eta_probs)
                .map(|(&e, &p)| (PathState { sigma: e }, p))
                .collect(),
            MdsKind::VarFeedback { init, .. } => vec![(PathState { sigma: *init }, 1.0)],
        }
    }

    /// Conditional law of the next increment: (value, probability) atoms.
    pub fn conditional_support(&self, state: PathState) -> [(f64, f64); 2] {
        [(-state.sigma, 0.5), (state.sigma, 0.5)]
    }

    pub fn advance(&self, state: PathState, x: f64) -> PathState {
        match self {
            MdsKind::VarFeedback { pos, neg, .. } => PathState { sigma: if x > 0.0 { *pos } else { *neg } },
            _ => state,
        }
    }

    pub fn initial_state<R: RngCore>(&self, rng: &mut R) -> PathState {
        match self {
            MdsKind::HallMixture { eta_values, eta_probs } => {
                PathState { sigma: eta_values[draw_index(rng, &cumulative(eta_probs))] }
            }
            _ => self.initial_states()[0].0,
        }
    }

    /// One path of length n as (σ_i, X_i) pairs.
    pub fn sample_path<R: RngCore>(&self, rng: &mut R, n: usize) -> Vec<(f64, f64)> {
        let mut state = self.initial_state(rng);
        let mut out = Vec::with_capacity(n);
        let mut bits = 0u64;
        for i in 0..n {
            if i % 64 == 0 {
                bits = rng.next_u64();
            }
            let x = if (bits >> (i % 64)) & 1 == 1 { state.sigma } else { -state.sigma };
            out.push((state.sigma, x));
            state = self.advance(state, x);
        }
        out
    }

    /// s_n² = E[S_n²] = Σ E[σ_i²], in closed form.
    pub fn unconditional_variance(&self, n: usize) -> f64 {
        let nf = n as f64;
        match self {
            MdsKind::IidRademacher => nf,
            MdsKind::HallMixture { eta_values, eta_probs } => {
                nf * eta_values.iter().zip(eta_probs).map(|(e, p)| p * e * e).sum::<f64>()
            }
            MdsKind::VarFeedback { init, pos, neg } => {
                if n == 0 {
                    0.0
                } else {
                    init * init + (nf - 1.0) * (pos * pos + neg * neg) / 2.0
                }
            }
        }
    }
}

pub(crate) fn check_probs(probs: &[f64]) -> Result<()> {
    if probs.iter().any(|p| !(*p >= 0.0)) {
        return Err(Error::InvalidParams("probabilities must be non-negative".into()));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParams(format!("probabilities must sum to 1, got {total}")));
    }
    Ok(())
}

impl MdsModel {
    pub fn new(kind: MdsKind, n: usize) -> Result<Self> {
        kind.validate()?;
        if n == 0 {
            return Err(Error::InvalidParams("n must be at least 1".into()));
        }
        Ok(MdsModel { kind, n })
    }
}

/// Finite law of the Hall limit T (here the row scale η), used for T'·N(0,1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureLimit {
    pub atoms: Vec<(f64, f64)>,
}

impl MixtureLimit {
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidParams("mixture needs at least one atom".into()));
        }
        if atoms.iter().any(|(t, _)| !(*t >= 0.0 && t.is_finite())) {
            return Err(Error::InvalidParams("mixture atoms must be non-negative".into()));
        }
        check_probs(&atoms.iter().map(|a| a.1).collect::<Vec<_>>())?;
        Ok(MixtureLimit { atoms })
    }

    pub fn from_eta(values: &[f64], probs: &[f64]) -> Result<Self> {
        if values.len() != probs.len() {
            return Err(Error::InvalidParams("eta_values and eta_probs differ in length".into()));
        }
        Self::new(values.iter().copied().zip(probs.iter().copied()).collect())
    }

    /// P(T'·Z ≤ x) = Σ p_j Φ(x/t_j), with a unit step for t_j = 0.
    pub fn cdf(&self, x: f64) -> f64 {
        self.atoms
            .iter()
            .map(|&(t, p)| {
                let f = if t > 0.0 {
                    crate::numerics::std_normal_cdf(x / t)
                } else if x >= 0.0 {
                    1.0
                } else {
                    0.0
                };
                p * f
            })
            .sum()
    }

    pub fn second_moment(&self) -> f64 {
        self.atoms.iter().map(|(t, p)| p * t * t).sum()
    }
}
