//! Adversarial dynamic programming over rectangular sets of measures.
//!
//! The adversary picks the conditional mean (or standard deviation) of each
//! increment after seeing the history; backward induction over a statistic grid
//! gives the finite-n sup/inf expectation, which is compared with the explicit
//! limit densities or the PDE solvers.
//!
//! The grid spacing is the innovation scale divided by an integer, so every
//! innovation move lands on a grid point; only the drift μ/n of the mean case is
//! interpolated.

mod dp;
mod model;

pub use dp::{
    lindeberg_condition_value, refinement, sup_expectation_dp, AdversaryPolicy, DpGrid, DpOptions, DpOutcome,
    DpState, GRID_ERROR_LIMIT,
};
pub use model::{Innovation, ModelKind, RectangularModel};

use serde::Serialize;

use crate::densities::{
    integrate_against, select_mean_limit_params, select_variance_limit_params, DensityParams, Family, Side,
};
use crate::numerics::{cumulative, draw_index, mean_and_se, run_blocks, SeedSpec};
use crate::report::{Cell, Table};
use crate::sublinear::{solve, Generator, HjbProblem, Resolution, TestFunction};
use crate::{Error, Result};

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub se: f64,
}

/// Simulates paths with the adversary following `policy` at the nearest grid point.
pub fn policy_simulate(
    model: &RectangularModel,
    policy: &AdversaryPolicy,
    phi: &TestFunction,
    reps: usize,
    spec: SeedSpec,
) -> Result<McEstimate> {
    model.validate()?;
    if policy.n != model.n {
        return Err(Error::PolicyMismatch(format!("policy has {} steps, model has n = {}", policy.n, model.n)));
    }
    if policy.choices.len() != policy.n * policy.grid.points() {
        return Err(Error::PolicyMismatch(format!(
            "policy holds {} choices, expected {} steps x {} points",
            policy.choices.len(),
            policy.n,
            policy.grid.points()
        )));
    }
    if let Some(u) = policy.controls.iter().find(|u| !model.admits(**u)) {
        return Err(Error::PolicyMismatch(format!("control {u} lies outside the model's interval")));
    }
    if policy.choices.iter().any(|&c| c as usize >= policy.controls.len()) {
        return Err(Error::PolicyMismatch("choice index beyond the control list".into()));
    }
    if reps == 0 {
        return Err(Error::InvalidParams("reps must be positive".into()));
    }
    let atoms = model.innovation.atoms();
    let values: Vec<f64> = atoms.iter().map(|a| a.0).collect();
    let cum = cumulative(&atoms.iter().map(|a| a.1).collect::<Vec<_>>());
    let samples = run_blocks(spec, reps, |rng, count| {
        (0..count)
            .map(|_| {
                let mut y = 0.0;
                for step in 0..model.n {
                    let u = policy.control(step, policy.grid.nearest(y));
                    let e = values[draw_index(rng, &cum)];
                    y += model.statistic_move(u, e);
                }
                phi.eval(y)
            })
            .collect()
    });
    let (mean, se) = mean_and_se(&samples);
    Ok(McEstimate { mean, se })
}

/// Where a limit value came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum LimitSource {
    ChenEpstein(DensityParams),
    Cez(DensityParams),
    Pde,
}

/// The n → ∞ value of the sup/inf expectation: an explicit density integral when
/// φ's shape qualifies (or the interval is degenerate), otherwise the PDE solver.
pub fn limit_value(kind: &ModelKind, phi: &TestFunction, side: Side) -> Result<(f64, LimitSource)> {
    let bound = phi.magnitude();
    let shape = phi.shape;
    let center = shape.map(|s| s.center).unwrap_or(0.0);
    let explicit = match *kind {
        ModelKind::MeanUncertain { interval, .. } => {
            if interval.half_width() == 0.0 {
                Some(DensityParams::new(0.0, interval.midpoint(), center))
            } else {
                shape
                    .filter(|s| s.symmetric)
                    .and_then(|s| s.monotone_right)
                    .map(|mono| select_mean_limit_params(&interval, center, mono, side))
            }
            .map(LimitSource::ChenEpstein)
        }
        ModelKind::VarianceUncertain { interval } => {
            if interval.is_degenerate() {
                Some(DensityParams::new(interval.low(), interval.low(), 0.0))
            } else {
                shape.and_then(|s| {
                    let (env, theta) = s.s_shape?;
                    if (theta - interval.theta()).abs() > 1e-12 {
                        return None;
                    }
                    select_variance_limit_params(&interval, s.center, s.convexity_right?, side, env).ok()
                })
            }
            .map(LimitSource::Cez)
        }
    };
    match explicit {
        Some(LimitSource::ChenEpstein(p)) => {
            let q = integrate_against(Family::ChenEpstein, &p, |y| phi.eval(y), bound, 1e-10, &[])?;
            Ok((q.value, LimitSource::ChenEpstein(p)))
        }
        Some(LimitSource::Cez(p)) => {
            let q = integrate_against(Family::Cez, &p, |y| phi.eval(y), bound, 1e-10, &[])?;
            Ok((q.value, LimitSource::Cez(p)))
        }
        _ => {
            let generator = match *kind {
                ModelKind::MeanUncertain { interval, .. } => Generator::Mean { interval, side },
                ModelKind::VarianceUncertain { interval } => Generator::Variance { interval, side },
            };
            let grid = solve(&HjbProblem { generator, terminal: phi.clone(), resolution: Resolution::default() })?;
            Ok((grid.root_value(), LimitSource::Pde))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub dp_value: f64,
    pub limit_value: f64,
    pub gap: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    pub source: LimitSource,
}

impl ConvergenceTable {
    pub fn gap(&self, n: usize) -> Option<f64> {
        self.rows.iter().find(|r| r.n == n).map(|r| r.gap)
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["n", "dp_value", "limit_value", "gap"]);
        for r in &self.rows {
            t.push(vec![Cell::from(r.n), r.dp_value.into(), r.limit_value.into(), r.gap.into()]);
        }
        t
    }
}

/// DP value against the limit along an n schedule. `template.n` is ignored.
pub fn convergence_experiment(
    template: &RectangularModel,
    phi: &TestFunction,
    schedule: &[usize],
    opts: &DpOptions,
) -> Result<ConvergenceTable> {
    if schedule.is_empty() {
        return Err(Error::InvalidParams("empty n schedule".into()));
    }
    let (limit, source) = limit_value(&template.kind, phi, opts.side)?;
    let opts = DpOptions { record_policy: false, ..*opts };
    let rows = schedule
        .iter()
        .map(|&n| {
            let dp = sup_expectation_dp(&template.with_n(n), phi, &opts)?.value;
            Ok(ConvergenceRow { n, dp_value: dp, limit_value: limit, gap: (dp - limit).abs() })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceTable { rows, source })
}

/// Exhaustive recursion over every innovation path, optimising the control at
/// each node of the (non-recombining) tree. Exponential in n.
pub fn brute_force_value(model: &RectangularModel, phi: &TestFunction, side: Side, enrich: bool) -> Result<f64> {
    model.validate()?;
    if model.n > 16 {
        return Err(Error::InvalidParams(format!("brute force is limited to n <= 16, got {}", model.n)));
    }
    let controls = model.controls(enrich);
    let atoms = model.innovation.atoms();
    fn go(
        model: &RectangularModel,
        phi: &TestFunction,
        side: Side,
        controls: &[f64],
        atoms: &[(f64, f64)],
        y: f64,
        left: usize,
    ) -> f64 {
        if left == 0 {
            return phi.eval(y);
        }
        let values = controls.iter().map(|&u| {
            atoms
                .iter()
                .map(|&(e, p)| p * go(model, phi, side, controls, atoms, y + model.statistic_move(u, e), left - 1))
                .sum::<f64>()
        });
        match side {
            Side::Sup => values.fold(f64::NEG_INFINITY, f64::max),
            Side::Inf => values.fold(f64::INFINITY, f64::min),
        }
    }
    Ok(go(model, phi, side, &controls, &atoms, 0.0, model.n))
}

#[cfg(test)]
mod tests;
