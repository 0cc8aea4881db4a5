//! Classical CLT chain: De Moivre–Laplace, Laplace's explicit approximation and the
//! Lyapunov, Lindeberg and Feller condition statistics.
//!
//! All moment computations are exact sums over a finite support.

mod binomial;
mod model;

pub use binomial::{binomial_standardized_prob, laplace_approx, laplace_exact, LaplaceParams};
pub use model::{IidLaw, IidModel};

use crate::numerics::ks::ks_one_sample;
use crate::numerics::{cumulative, draw_index, rademacher_sum, run_blocks, std_normal_cdf, uniform01, SeedSpec};
use crate::report::{Cell, Table};
use crate::{Error, Result};

/// (1/B_n^{1+δ/2}) Σ E|X_i − EX_i|^{2+δ} for the iid model, B_n = nσ².
pub fn lyapunov_statistic(model: &IidModel, n: usize) -> Result<f64> {
    let sigma2 = model.law.variance();
    if !(sigma2 > 0.0) {
        return Err(Error::InvalidParams("Lyapunov statistic needs a non-degenerate law (sigma > 0)".into()));
    }
    if n == 0 {
        return Err(Error::InvalidParams("n must be positive".into()));
    }
    let order = 2.0 + model.delta;
    let moment = model.law.abs_central_moment(order);
    Ok(moment / (sigma2.powf(order / 2.0) * (n as f64).powf(model.delta / 2.0)))
}

/// (1/B_n) Σ E[(X_i − EX_i)² 1{|X_i − EX_i| > ε√B_n}] for the iid model.
pub fn lindeberg_statistic(model: &IidModel, n: usize, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParams(format!("eps > 0 required, got {eps}")));
    }
    let law = &model.law;
    let mu = law.mean();
    let sigma2 = law.variance();
    if !(sigma2 > 0.0) || n == 0 {
        return Err(Error::InvalidParams("Lindeberg statistic needs sigma > 0 and n >= 1".into()));
    }
    let threshold = eps * (n as f64 * sigma2).sqrt();
    let truncated: f64 = law
        .support()
        .iter()
        .filter(|(x, _)| (x - mu).abs() > threshold)
        .map(|(x, p)| p * (x - mu) * (x - mu))
        .sum();
    Ok(truncated / sigma2)
}

/// max σ_i² / Σ σ_i².
pub fn feller_ratio(variances: &[f64]) -> Result<f64> {
    if variances.is_empty() {
        return Err(Error::InvalidParams("feller_ratio needs at least one variance".into()));
    }
    if variances.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidParams("variances must be positive".into()));
    }
    let max = variances.iter().copied().fold(f64::MIN, f64::max);
    let total: f64 = variances.iter().sum();
    Ok(max / total)
}

/// KS distance between the law of (S_n − nμ)/√(nσ²), estimated from `reps`
/// replications, and Φ.
pub fn simulate_clt_distance(model: &IidModel, n: usize, reps: usize, spec: SeedSpec) -> Result<f64> {
    if reps < 100 {
        return Err(Error::InvalidParams(format!("reps >= 100 required, got {reps}")));
    }
    if n == 0 {
        return Err(Error::InvalidParams("n must be positive".into()));
    }
    let law = &model.law;
    let mu = law.mean();
    let sd = (n as f64 * law.variance()).sqrt();
    if !(sd > 0.0) {
        return Err(Error::InvalidParams("degenerate law".into()));
    }
    let nf = n as f64;
    let mut sample = match law {
        IidLaw::Rademacher => run_blocks(spec, reps, |rng, k| {
            (0..k).map(|_| rademacher_sum(rng, n) as f64 / sd).collect()
        }),
        IidLaw::Bernoulli { p } => {
            let p = *p;
            run_blocks(spec, reps, move |rng, k| {
                (0..k)
                    .map(|_| {
                        let hits = (0..n).filter(|_| uniform01(rng) < p).count();
                        (hits as f64 - nf * mu) / sd
                    })
                    .collect()
            })
        }
        IidLaw::Discrete { values, probs } => {
            let cum = cumulative(probs);
            run_blocks(spec, reps, |rng, k| {
                (0..k)
                    .map(|_| {
                        let s: f64 = (0..n).map(|_| values[draw_index(rng, &cum)]).sum();
                        (s - nf * mu) / sd
                    })
                    .collect()
            })
        }
    };
    Ok(ks_one_sample(&mut sample, std_normal_cdf))
}

/// Lyapunov, Lindeberg and Feller statistics along an `n` ladder, as an
/// `n,statistic,value` table.
pub fn condition_report(model: &IidModel, ns: &[usize], eps: f64) -> Result<Table> {
    let mut t = Table::new(&["n", "statistic", "value"]);
    for &n in ns {
        t.push(vec![Cell::from(n), "lyapunov".into(), lyapunov_statistic(model, n)?.into()]);
        t.push(vec![Cell::from(n), "lindeberg".into(), lindeberg_statistic(model, n, eps)?.into()]);
        let variances = vec![model.law.variance(); n];
        t.push(vec![Cell::from(n), "feller".into(), feller_ratio(&variances)?.into()]);
    }
    Ok(t)
}
