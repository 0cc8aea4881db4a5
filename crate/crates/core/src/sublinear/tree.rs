use super::solver::{Generator, HjbProblem};
use crate::densities::{Side, VarianceInterval};
use crate::{Error, Result};

/// Smallest q ≤ 64 with q·r within 1e-9 of an integer.
pub(crate) fn commensurate_denominator(r: f64) -> Option<(usize, usize)> {
    (1..=64usize).find_map(|q| {
        let m = q as f64 * r;
        let rounded = m.round();
        ((m - rounded).abs() <= 1e-9 * m.max(1.0)).then_some((q, rounded as usize))
    })
}

fn pick(side: Side, a: f64, b: f64) -> f64 {
    match side {
        Side::Sup => a.max(b),
        Side::Inf => a.min(b),
    }
}

/// Backward induction on a recombining lattice with an adversary choosing the
/// extreme control at every node.
///
/// Variance case: ±1 innovations scaled by σ/√steps, σ ∈ {σ̲, σ̄}, on a lattice of
/// spacing σ̲/(q√steps) with q the smallest integer making q·σ̄/σ̲ whole; an
/// incommensurate ratio falls back to a trinomial lattice of spacing σ̄/√steps.
/// Mean case: ±1/√steps innovations whose up-probability ½(1 + μ/√steps) carries
/// drift μ/steps per step, μ ∈ {μ̲, μ̄}.
pub fn tree_value_oracle(problem: &HjbProblem, steps: usize) -> Result<f64> {
    if steps == 0 {
        return Err(Error::InvalidParams("steps must be at least 1".into()));
    }
    let phi = &problem.terminal;
    match problem.generator {
        Generator::Variance { interval, side } => variance_tree(&interval, side, steps, &|x| phi.eval(x)),
        Generator::Mean { interval, side } => {
            let root = (steps as f64).sqrt();
            let probs: Vec<f64> = [interval.low(), interval.high()]
                .iter()
                .map(|mu| (0.5 * (1.0 + mu / root)).clamp(0.0, 1.0))
                .collect();
            // node j at step k sits at (2j − k)/√steps
            let mut v: Vec<f64> = (0..=steps).map(|j| phi.eval((2.0 * j as f64 - steps as f64) / root)).collect();
            for k in (0..steps).rev() {
                for j in 0..=k {
                    let (down, up) = (v[j], v[j + 1]);
                    let a = probs[0] * up + (1.0 - probs[0]) * down;
                    let b = probs[1] * up + (1.0 - probs[1]) * down;
                    v[j] = pick(side, a, b);
                }
            }
            Ok(v[0])
        }
    }
}

fn variance_tree(v: &VarianceInterval, side: Side, steps: usize, phi: &dyn Fn(f64) -> f64) -> Result<f64> {
    let root = (steps as f64).sqrt();
    let (lo, hi) = (v.low(), v.high());
    if let Some((q, m_hi)) = commensurate_denominator(hi / lo) {
        // moves of q (σ̲) or m_hi (σ̄) cells of width σ̲/(q√steps)
        let unit = lo / (q as f64 * root);
        let reach = m_hi * steps;
        let width = 2 * reach + 1;
        let mut val: Vec<f64> = (0..width).map(|i| phi((i as f64 - reach as f64) * unit)).collect();
        let mut next = val.clone();
        for k in (0..steps).rev() {
            let span = m_hi * k;
            for i in (reach - span)..=(reach + span) {
                let a = 0.5 * (val[i + q] + val[i - q]);
                let b = 0.5 * (val[i + m_hi] + val[i - m_hi]);
                next[i] = pick(side, a, b);
            }
            std::mem::swap(&mut val, &mut next);
        }
        return Ok(val[reach]);
    }
    // trinomial: ±σ̄/√steps with probability σ²/(2σ̄²) each, else stay
    let unit = hi / root;
    let p = [0.5 * (lo / hi).powi(2), 0.5];
    let width = 2 * steps + 1;
    let mut val: Vec<f64> = (0..width).map(|i| phi((i as f64 - steps as f64) * unit)).collect();
    let mut next = val.clone();
    for k in (0..steps).rev() {
        for i in (steps - k)..=(steps + k) {
            let ev = |p: f64| p * (val[i + 1] + val[i - 1]) + (1.0 - 2.0 * p) * val[i];
            next[i] = pick(side, ev(p[0]), ev(p[1]));
        }
        std::mem::swap(&mut val, &mut next);
    }
    Ok(val[steps])
}
