use serde::Serialize;

use super::model::RectangularModel;
use crate::densities::Side;
use crate::numerics::Grid1D;
use crate::parallel::{for_each_chunk_mut2, MIN_CHUNK, PAR_SWEEP_MIN};
use crate::sublinear::TestFunction;
use crate::{Error, Result};

/// Limit on the Richardson estimate of the grid error.
pub const GRID_ERROR_LIMIT: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DpOptions {
    pub side: Side,
    /// Variance case: five controls instead of {σ̲, σ̄}.
    pub enrich_controls: bool,
    /// Approximate number of points in the fine statistic grid.
    pub target_points: usize,
    /// Run the coarse grid too and fail with GridTooCoarse above the limit.
    pub richardson: bool,
    pub record_policy: bool,
}

impl DpOptions {
    pub fn new(side: Side) -> Self {
        DpOptions { side, enrich_controls: false, target_points: 4001, richardson: true, record_policy: true }
    }
}

/// Uniform statistic grid x_i = (i − half)·dx, i = 0..=2·half.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DpGrid {
    pub dx: f64,
    pub half: usize,
}

impl DpGrid {
    pub fn points(&self) -> usize {
        2 * self.half + 1
    }

    pub fn x(&self, i: usize) -> f64 {
        (i as f64 - self.half as f64) * self.dx
    }

    pub fn nearest(&self, x: f64) -> usize {
        ((x / self.dx).round() + self.half as f64).clamp(0.0, (self.points() - 1) as f64) as usize
    }

    pub fn as_grid1d(&self) -> Result<Grid1D> {
        Grid1D::new(self.x(0), self.x(self.points() - 1), self.points())
    }
}

/// Values of the continuation over the statistic grid after `step` increments.
#[derive(Debug, Clone, PartialEq)]
pub struct DpState {
    pub step: usize,
    pub grid: DpGrid,
    pub values: Vec<f64>,
}

impl DpState {
    /// The terminal state: φ sampled on the grid at step n.
    pub fn terminal(model: &RectangularModel, grid: DpGrid, phi: &TestFunction) -> Self {
        let values = (0..grid.points()).map(|i| phi.eval(grid.x(i))).collect();
        DpState { step: model.n, grid, values }
    }

    pub fn root_value(&self) -> f64 {
        self.values[self.grid.half]
    }
}

/// Control index chosen at every (step, grid point), steps 0..n.
#[derive(Debug, Clone, PartialEq)]
pub struct AdversaryPolicy {
    pub controls: Vec<f64>,
    pub n: usize,
    pub grid: DpGrid,
    pub choices: Vec<u8>,
}

impl AdversaryPolicy {
    pub fn control(&self, step: usize, point: usize) -> f64 {
        self.controls[self.choices[step * self.grid.points() + point] as usize]
    }
}

#[derive(Debug, Clone)]
pub struct DpOutcome {
    pub value: f64,
    /// |V_fine − V_coarse|/3, or 0 when Richardson is off.
    pub grid_error: f64,
    pub policy: Option<AdversaryPolicy>,
    pub grid: DpGrid,
}

/// Shift by `s` cells as a whole part and a fraction in [0, 1).
#[derive(Debug, Clone, Copy)]
struct Shift {
    whole: isize,
    frac: f64,
    weight: f64,
}

fn shift(cells: f64, weight: f64) -> Shift {
    let r = cells.round();
    if (cells - r).abs() <= 1e-9 * r.abs().max(1.0) {
        return Shift { whole: r as isize, frac: 0.0, weight };
    }
    let f = cells.floor();
    Shift { whole: f as isize, frac: cells - f, weight }
}

/// Grid for refinement factor k: dx = base/k, covering [−L, L].
fn grid_for(model: &RectangularModel, k: usize, halfwidth: f64) -> DpGrid {
    let dx = model.base_spacing() / k as f64;
    DpGrid { dx, half: (halfwidth / dx).ceil() as usize }
}

/// Fine and coarse refinement factors (k = 2 k_c, both multiples of the
/// lattice denominator).
pub fn refinement(model: &RectangularModel, enrich: bool, target_points: usize, halfwidth: f64) -> (usize, usize) {
    let q = model.lattice_denominator(enrich);
    let k0 = (model.base_spacing() * (target_points.max(3) - 1) as f64 / (2.0 * halfwidth)).round() as usize;
    let coarse = q * (k0 / (2 * q)).max(1);
    (2 * coarse, coarse)
}

/// One backward step: V_{m}(x) = opt_u Σ_l p_l V_{m+1}(x + move(u, ε_l)).
/// Ties go to the lower control.
fn backward_step(
    values: &[f64],
    next: &mut [f64],
    choice: &mut [u8],
    shifts: &[Vec<Shift>],
    side: Side,
) {
    let last = values.len() as isize - 1;
    let at = |i: isize| values[i.clamp(0, last) as usize];
    let eval = |i: usize, sh: &[Shift]| -> f64 {
        sh.iter()
            .map(|s| {
                let idx = i as isize + s.whole;
                let v = if s.frac == 0.0 { at(idx) } else { at(idx) * (1.0 - s.frac) + at(idx + 1) * s.frac };
                s.weight * v
            })
            .sum()
    };
    let sweep = |offset: usize, out: &mut [f64], pick: &mut [u8]| {
        for (k, (o, c)) in out.iter_mut().zip(pick.iter_mut()).enumerate() {
            let i = offset + k;
            let mut best = eval(i, &shifts[0]);
            let mut arg = 0u8;
            for (j, sh) in shifts.iter().enumerate().skip(1) {
                let v = eval(i, sh);
                let better = match side {
                    Side::Sup => v > best,
                    Side::Inf => v < best,
                };
                if better {
                    best = v;
                    arg = j as u8;
                }
            }
            *o = best;
            *c = arg;
        }
    };
    if values.len() < PAR_SWEEP_MIN {
        sweep(0, next, choice);
    } else {
        for_each_chunk_mut2(next, choice, MIN_CHUNK, sweep);
    }
}

fn run_grid(
    model: &RectangularModel,
    phi: &TestFunction,
    grid: DpGrid,
    controls: &[f64],
    side: Side,
    record: bool,
) -> (DpState, Option<AdversaryPolicy>) {
    let atoms = model.innovation.atoms();
    let shifts: Vec<Vec<Shift>> = controls
        .iter()
        .map(|&u| atoms.iter().map(|&(e, p)| shift(model.statistic_move(u, e) / grid.dx, p)).collect())
        .collect();
    let points = grid.points();
    let mut state = DpState::terminal(model, grid, phi);
    let mut next = vec![0.0; points];
    let mut choices = if record { vec![0u8; model.n * points] } else { Vec::new() };
    let mut scratch = vec![0u8; points];
    for step in (0..model.n).rev() {
        let pick: &mut [u8] = if record { &mut choices[step * points..(step + 1) * points] } else { &mut scratch };
        backward_step(&state.values, &mut next, pick, &shifts, side);
        std::mem::swap(&mut state.values, &mut next);
        state.step = step;
    }
    let policy = record.then(|| AdversaryPolicy { controls: controls.to_vec(), n: model.n, grid, choices });
    (state, policy)
}

/// sup (or inf) over the adversary's adapted controls of E[φ(statistic at step n)].
pub fn sup_expectation_dp(model: &RectangularModel, phi: &TestFunction, opts: &DpOptions) -> Result<DpOutcome> {
    model.validate()?;
    if !phi.is_bounded() {
        return Err(Error::InvalidParams(format!("{}: the DP needs a bounded terminal with limits", phi.name)));
    }
    let controls = model.controls(opts.enrich_controls);
    if controls.len() > u8::MAX as usize {
        return Err(Error::InvalidParams("too many controls".into()));
    }
    let center = phi.shape.map(|s| s.center).unwrap_or(0.0);
    let halfwidth = model.halfwidth(center);
    let (fine_k, coarse_k) = refinement(model, opts.enrich_controls, opts.target_points, halfwidth);
    let grid = grid_for(model, fine_k, halfwidth);
    let (state, policy) = run_grid(model, phi, grid, &controls, opts.side, opts.record_policy);
    let value = state.root_value();
    let mut grid_error = 0.0;
    if opts.richardson {
        let coarse = grid_for(model, coarse_k, halfwidth);
        let (coarse_state, _) = run_grid(model, phi, coarse, &controls, opts.side, false);
        grid_error = (value - coarse_state.root_value()).abs() / 3.0;
        if grid_error > GRID_ERROR_LIMIT {
            return Err(Error::GridTooCoarse { estimate: grid_error, limit: GRID_ERROR_LIMIT });
        }
    }
    Ok(DpOutcome { value, grid_error, policy, grid })
}

/// (1/n) Σ_i sup_u E[X_i² 1{|X_i| > √(nε)}]; the sup runs over the control grid.
pub fn lindeberg_condition_value(model: &RectangularModel, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParams(format!("eps > 0 required, got {eps}")));
    }
    model.validate()?;
    let threshold = (model.n as f64 * eps).sqrt();
    let atoms = model.innovation.atoms();
    // every step has the same conditional law family, so the average is one term
    Ok(model
        .controls(true)
        .iter()
        .map(|&u| {
            atoms
                .iter()
                .map(|&(e, p)| {
                    let x = model.increment(u, e);
                    if x.abs() > threshold {
                        p * x * x
                    } else {
                        0.0
                    }
                })
                .sum::<f64>()
        })
        .fold(0.0, f64::max))
}
