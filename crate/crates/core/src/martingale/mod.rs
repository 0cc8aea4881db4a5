//! Martingale-difference models and the Lévy, Brown, McLeish and Hall diagnostics.
//!
//! Condition terms are exact sums over each step's known conditional law along a
//! simulated path; Monte Carlo enters only through the path itself.

mod model;

pub(crate) use model::check_probs;
pub use model::{MdsKind, MdsModel, MixtureLimit, PathState};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::numerics::ks::{ks_one_sample, ks_two_sample};
use crate::numerics::{cumulative, draw_index, mean_and_se, rademacher_sum, run_blocks, SeedSpec};
use crate::report::{Cell, Table};
use crate::{Error, Result};

pub const DEFAULT_LEVY_EPS: f64 = 0.1;

/// The four Lévy sums at time n along one path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevyTerms {
    /// Σ P(|X_i| > ε b_n | F_{i−1})
    pub tail: f64,
    /// (1/b_n) Σ E[X_i 1{|X_i| > ε b_n} | F_{i−1}]
    pub first: f64,
    /// (1/b_n²) Σ E[X_i² 1{|X_i| > ε b_n} | F_{i−1}]
    pub second: f64,
    /// (1/b_n²) Σ (E[X_i 1{|X_i| > ε b_n} | F_{i−1}])²
    pub first_squared: f64,
}

pub fn levy_condition_terms(model: &MdsModel, eps: f64, spec: SeedSpec) -> Result<LevyTerms> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParams(format!("eps > 0 required, got {eps}")));
    }
    model.kind.validate()?;
    let n = model.n;
    if n == 0 {
        return Err(Error::InvalidParams("n must be at least 1".into()));
    }
    let mut rng = spec.rng();
    let path = model.kind.sample_path(&mut rng, n);
    let b2: f64 = path.iter().map(|(s, _)| s * s).sum();
    let b = b2.sqrt();
    let threshold = eps * b;

    let mut terms = LevyTerms { tail: 0.0, first: 0.0, second: 0.0, first_squared: 0.0 };
    for &(sigma, _) in &path {
        let law = model.kind.conditional_support(PathState { sigma });
        let mut first = 0.0;
        for (v, p) in law {
            if v.abs() > threshold {
                terms.tail += p;
                first += p * v;
                terms.second += p * v * v;
            }
        }
        terms.first += first;
        terms.first_squared += first * first;
    }
    terms.first /= b;
    terms.second /= b2;
    terms.first_squared /= b2;
    Ok(terms)
}

/// Monte Carlo estimates of the two Brown ratios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BrownRatios {
    /// mean of b_n²/s_n²
    pub variance_ratio: f64,
    pub variance_ratio_se: f64,
    /// mean of |b_n²/s_n² − 1|; zero exactly when the ratio is degenerate at 1
    pub variance_ratio_abs_dev: f64,
    /// mean of max_i σ_i²/s_n²
    pub max_ratio: f64,
    pub max_ratio_se: f64,
}

pub fn brown_ratios(model: &MdsModel, reps: usize, spec: SeedSpec) -> Result<BrownRatios> {
    if reps < 100 {
        return Err(Error::InvalidParams(format!("reps >= 100 required, got {reps}")));
    }
    model.kind.validate()?;
    let n = model.n;
    let s2 = model.kind.unconditional_variance(n);
    if !(s2 > 0.0) {
        return Err(Error::InvalidParams("n must be at least 1".into()));
    }
    let kind = &model.kind;
    let pairs = run_blocks(spec, reps, |rng, count| {
        (0..count)
            .map(|_| {
                let path = kind.sample_path(rng, n);
                let b2: f64 = path.iter().map(|(s, _)| s * s).sum();
                let max = path.iter().map(|(s, _)| s * s).fold(0.0, f64::max);
                (b2 / s2, max / s2)
            })
            .collect()
    });
    let first: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let second: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let (variance_ratio, variance_ratio_se) = mean_and_se(&first);
    let (max_ratio, max_ratio_se) = mean_and_se(&second);
    let dev: Vec<f64> = first.iter().map(|r| (r - 1.0).abs()).collect();
    Ok(BrownRatios {
        variance_ratio,
        variance_ratio_se,
        variance_ratio_abs_dev: mean_and_se(&dev).0,
        max_ratio,
        max_ratio_se,
    })
}

/// Exact (E[b_n²/s_n²], E[max_i σ_i²/s_n²]).
pub fn brown_ratio_means_exact(kind: &MdsKind, n: usize) -> Result<(f64, f64)> {
    kind.validate()?;
    if n == 0 {
        return Err(Error::InvalidParams("n must be at least 1".into()));
    }
    let s2 = kind.unconditional_variance(n);
    let max = match kind {
        MdsKind::IidRademacher | MdsKind::HallMixture { .. } => s2 / n as f64,
        MdsKind::VarFeedback { init, pos, neg } => {
            let i2 = init * init;
            if n == 1 {
                i2
            } else {
                // σ_2, …, σ_n are iid uniform on {pos, neg}
                let (hi, lo) = (pos.max(*neg).powi(2), pos.min(*neg).powi(2));
                let all_low = if pos == neg { 1.0 } else { 0.5f64.powi(n as i32 - 1) };
                (1.0 - all_low) * i2.max(hi) + all_low * i2.max(lo)
            }
        }
    };
    Ok((1.0, max / s2))
}

/// Monte Carlo estimate of E[Π_i (1 + i t X_{n,i})].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McLeishEstimate {
    pub mean_re: f64,
    pub mean_im: f64,
    pub se_re: f64,
    pub se_im: f64,
}

impl McLeishEstimate {
    pub fn mean(&self) -> Complex64 {
        Complex64::new(self.mean_re, self.mean_im)
    }

    /// Whether `target` lies within `k` standard errors in both components.
    pub fn within(&self, target: Complex64, k: f64) -> bool {
        (self.mean_re - target.re).abs() <= k * self.se_re && (self.mean_im - target.im).abs() <= k * self.se_im
    }
}

/// Row normalisation 1/s_{k_n} turning a path into the array X_{n,i}.
fn array_scale(kind: &MdsKind, k_n: usize) -> f64 {
    1.0 / kind.unconditional_variance(k_n).sqrt()
}

/// E[T_n] for the array X_{n,i} = X_i/s_{k_n} built from `model` (k_n = model.n).
pub fn mcleish_product_mean(model: &MdsModel, t: f64, reps: usize, spec: SeedSpec) -> Result<McLeishEstimate> {
    if !t.is_finite() {
        return Err(Error::InvalidParams("t must be finite".into()));
    }
    if reps < 1000 {
        return Err(Error::InvalidParams(format!("reps >= 1000 required, got {reps}")));
    }
    model.kind.validate()?;
    let k_n = model.n;
    let scale = array_scale(&model.kind, k_n);
    let kind = &model.kind;
    let products = run_blocks(spec, reps, |rng, count| {
        (0..count)
            .map(|_| {
                kind.sample_path(rng, k_n)
                    .iter()
                    .fold(Complex64::new(1.0, 0.0), |acc, &(_, x)| acc * Complex64::new(1.0, t * x * scale))
            })
            .collect()
    });
    let re: Vec<f64> = products.iter().map(|z| z.re).collect();
    let im: Vec<f64> = products.iter().map(|z| z.im).collect();
    let (mean_re, se_re) = mean_and_se(&re);
    let (mean_im, se_im) = mean_and_se(&im);
    Ok(McLeishEstimate { mean_re, mean_im, se_re, se_im })
}

/// E[T_n] by exhaustive enumeration of the outcome tree (k_n ≤ 20).
pub fn mcleish_product_exact(kind: &MdsKind, k_n: usize, t: f64) -> Result<Complex64> {
    kind.validate()?;
    if k_n == 0 || k_n > 20 {
        return Err(Error::InvalidParams(format!("enumeration needs 1 <= k_n <= 20, got {k_n}")));
    }
    let scale = array_scale(kind, k_n);
    fn walk(kind: &MdsKind, state: PathState, left: usize, t: f64, scale: f64) -> Complex64 {
        if left == 0 {
            return Complex64::new(1.0, 0.0);
        }
        kind.conditional_support(state)
            .iter()
            .map(|&(v, p)| p * Complex64::new(1.0, t * v * scale) * walk(kind, kind.advance(state, v), left - 1, t, scale))
            .sum()
    }
    Ok(kind
        .initial_states()
        .into_iter()
        .map(|(s, p)| p * walk(kind, s, k_n, t, scale))
        .sum())
}

/// Draws of T'·Z with T' from `limit` and Z standard normal, independent.
pub fn hall_mixture_sampler(limit: &MixtureLimit, reps: usize, spec: SeedSpec) -> Vec<f64> {
    let probs: Vec<f64> = limit.atoms.iter().map(|a| a.1).collect();
    let cum = cumulative(&probs);
    run_blocks(spec, reps, |rng, count| {
        (0..count)
            .map(|_| {
                let t = limit.atoms[draw_index(rng, &cum)].0;
                let z: f64 = rng.sample(StandardNormal);
                t * z
            })
            .collect()
    })
}

/// KS distances between S_n of the Hall array and the mixture T'·N(0,1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HallCheck {
    /// one-sample statistic against Σ p_j Φ(x/η_j)
    pub ks_closed_form: f64,
    /// two-sample statistic against `reps` draws of the mixture sampler
    pub ks_two_sample: f64,
}

/// Row X_{n,i} = η ξ_i/√k_n, so Σ_i X_{n,i}² = η² and S_n = η·(Σ ξ_i)/√k_n.
pub fn hall_convergence_check(
    eta_values: &[f64],
    eta_probs: &[f64],
    k_n: usize,
    reps: usize,
    spec: SeedSpec,
) -> Result<HallCheck> {
    if k_n < 100 || reps < 1000 {
        return Err(Error::InvalidParams(format!("need k_n >= 100 and reps >= 1000, got {k_n}, {reps}")));
    }
    MdsKind::HallMixture { eta_values: eta_values.to_vec(), eta_probs: eta_probs.to_vec() }.validate()?;
    let limit = MixtureLimit::from_eta(eta_values, eta_probs)?;
    let cum = cumulative(eta_probs);
    let root = (k_n as f64).sqrt();
    let mut sums = run_blocks(spec, reps, |rng, count| {
        (0..count)
            .map(|_| {
                let eta = eta_values[draw_index(rng, &cum)];
                eta * rademacher_sum(rng, k_n) as f64 / root
            })
            .collect()
    });
    let mut reference = hall_mixture_sampler(&limit, reps, spec.with_stream(spec.stream ^ 0x8000_0000));
    let ks_closed_form = ks_one_sample(&mut sums, |x| limit.cdf(x));
    let ks_two_sample = ks_two_sample(&mut sums, &mut reference);
    Ok(HallCheck { ks_closed_form, ks_two_sample })
}

/// Lévy terms and Brown ratios along an n ladder as an `n,condition,value` table.
pub fn condition_report(kind: &MdsKind, ns: &[usize], eps: f64, reps: usize, spec: SeedSpec) -> Result<Table> {
    let mut t = Table::new(&["n", "condition", "value"]);
    for &n in ns {
        let model = MdsModel::new(kind.clone(), n)?;
        let levy = levy_condition_terms(&model, eps, spec)?;
        let brown = brown_ratios(&model, reps, spec)?;
        let rows: [(&str, f64); 7] = [
            ("levy_tail", levy.tail),
            ("levy_first", levy.first),
            ("levy_second", levy.second),
            ("levy_first_squared", levy.first_squared),
            ("brown_variance_ratio", brown.variance_ratio),
            ("brown_variance_ratio_abs_dev", brown.variance_ratio_abs_dev),
            ("brown_max_ratio", brown.max_ratio),
        ];
        for (name, value) in rows {
            t.push(vec![Cell::from(n), name.into(), value.into()]);
        }
    }
    Ok(t)
}
