use serde::{Deserialize, Serialize};

use super::test_function::TestFunction;
use crate::densities::{MeanInterval, Side, VarianceInterval};
use crate::numerics::Grid1D;
use crate::parallel::fill_indexed;
use crate::report::{Cell, Table};
use crate::{Error, Result};

/// G(a) = ½(σ̄² a⁺ − σ̲² a⁻).
pub fn compute_g(a: f64, v: &VarianceInterval) -> f64 {
    if a >= 0.0 {
        0.5 * v.high() * v.high() * a
    } else {
        0.5 * v.low() * v.low() * a
    }
}

/// g(z) = max_{μ ∈ [μ̲, μ̄]} μz on the sup side and the min on the inf side.
pub fn compute_g_mean(z: f64, m: &MeanInterval, side: Side) -> f64 {
    let (pos_coef, neg_coef) = match side {
        Side::Sup => (m.high(), m.low()),
        Side::Inf => (m.low(), m.high()),
    };
    if z >= 0.0 {
        pos_coef * z
    } else {
        neg_coef * z
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Generator {
    /// G-heat equation; the inf side is solved as −sup(−φ).
    Variance { interval: VarianceInterval, side: Side },
    /// Semilinear equation with unit diffusion and drift generator g.
    Mean { interval: MeanInterval, side: Side },
}

impl Generator {
    pub fn side(&self) -> Side {
        match self {
            Generator::Variance { side, .. } | Generator::Mean { side, .. } => *side,
        }
    }

    fn max_diffusion(&self) -> f64 {
        match self {
            Generator::Variance { interval, .. } => interval.high(),
            Generator::Mean { .. } => 1.0,
        }
    }

    /// L = |c| + 8σ̄, or |c| + 8 + |μ̄| + |μ̲|.
    pub fn default_halfwidth(&self, center: f64) -> f64 {
        match self {
            Generator::Variance { interval, .. } => center.abs() + 8.0 * interval.high(),
            Generator::Mean { interval, .. } => center.abs() + 8.0 + interval.high().abs() + interval.low().abs(),
        }
    }
}

/// Discretisation controls. Unset fields take the defaults of the scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Resolution {
    pub space_points: usize,
    #[serde(default)]
    pub domain_halfwidth: Option<f64>,
    #[serde(default)]
    pub time_steps: Option<usize>,
    /// Number of stored time slices, including t = 0 and t = 1.
    #[serde(default = "default_snapshots")]
    pub snapshots: usize,
}

fn default_snapshots() -> usize {
    11
}

impl Default for Resolution {
    fn default() -> Self {
        Resolution { space_points: 2001, domain_halfwidth: None, time_steps: None, snapshots: default_snapshots() }
    }
}

#[derive(Debug, Clone)]
pub struct HjbProblem {
    pub generator: Generator,
    pub terminal: TestFunction,
    pub resolution: Resolution,
}

/// u(t, x) at stored time slices, with the extremes seen over every step.

#[derive(Debug, Clone, PartialEq)]
pub struct ValueGrid {
    pub grid: Grid1D,
    /// (t, u(t, ·)) ordered from t = 1 down to t = 0.
    pub snapshots: Vec<(f64, Vec<f64>)>,
    pub time_steps: usize,
    pub dt: f64,
    pub running_min: f64,
    pub running_max: f64,
    pub terminal_min: f64,
    pub terminal_max: f64,
}

impl ValueGrid {
    pub fn initial(&self) -> &[f64] {
        &self.snapshots.last().expect("at least one snapshot").1
    }

    /// u(0, x) by linear interpolation.
    pub fn value_at(&self, x: f64) -> f64 {
        let u = self.initial();
        let h = self.grid.spacing();
        let s = ((x - self.grid.lo()) / h).clamp(0.0, (u.len() - 1) as f64);
        let i = (s.floor() as usize).min(u.len() - 2);
        let w = s - i as f64;
        u[i] * (1.0 - w) + u[i + 1] * w
    }

    /// u(0, 0).
    pub fn root_value(&self) -> f64 {
        self.value_at(0.0)
    }

    /// Whether every step stayed inside [min φ, max φ] on the grid, up to `slack`.
    pub fn satisfies_maximum_principle(&self, slack: f64) -> bool {
        self.running_min >= self.terminal_min - slack && self.running_max <= self.terminal_max + slack
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["t", "x", "u"]);
        for (time, u) in &self.snapshots {
            for (i, v) in u.iter().enumerate() {
                t.push(vec![Cell::from(*time), Cell::from(self.grid.point(i)), Cell::from(*v)]);
            }
        }
        t
    }
}

/// Explicit Euler march of u_τ = H(u_x, u_xx) from τ = 0 (t = 1) to τ = 1 (t = 0).
pub fn solve(problem: &HjbProblem) -> Result<ValueGrid> {
    let HjbProblem { generator, terminal, resolution } = problem;
    if let Generator::Mean { .. } = generator {
        if !terminal.is_bounded() {
            return Err(Error::InvalidParams(format!(
                "{}: the g-expectation solver needs a bounded terminal with limits at infinity",
                terminal.name
            )));
        }
    }
    if generator.side() == Side::Inf {
        let flipped = HjbProblem {
            generator: match *generator {
                Generator::Variance { interval, .. } => Generator::Variance { interval, side: Side::Sup },
                Generator::Mean { interval, .. } => Generator::Mean { interval, side: Side::Inf },
            },
            terminal: terminal.clone(),
            resolution: *resolution,
        };
        if let Generator::Mean { .. } = generator {
            return march(&flipped);
        }
        let negated = HjbProblem { terminal: terminal.negated(), ..flipped };
        let mut out = march(&negated)?;
        for (_, u) in out.snapshots.iter_mut() {
            u.iter_mut().for_each(|v| *v = -*v);
        }
        (out.running_min, out.running_max) = (-out.running_max, -out.running_min);
        (out.terminal_min, out.terminal_max) = (-out.terminal_max, -out.terminal_min);
        return Ok(out);
    }
    march(problem)
}

fn march(problem: &HjbProblem) -> Result<ValueGrid> {
    let HjbProblem { generator, terminal, resolution } = problem;
    let points = resolution.space_points;
    if points < 5 || points % 2 == 0 {
        return Err(Error::InvalidParams(format!("space_points must be odd and >= 5, got {points}")));
    }
    let center = terminal.shape.map(|s| s.center).unwrap_or(0.0);
    let halfwidth = resolution.domain_halfwidth.unwrap_or_else(|| generator.default_halfwidth(center));
    if !(halfwidth > 0.0) {
        return Err(Error::InvalidParams(format!("domain_halfwidth must be positive, got {halfwidth}")));
    }
    let grid = Grid1D::new(-halfwidth, halfwidth, points)?;
    let dx = grid.spacing();
    let sigma_max = generator.max_diffusion();
    let mu_max = match generator {
        Generator::Mean { interval, .. } => interval.max_abs(),
        Generator::Variance { .. } => 0.0,
    };
    let mut dt_max = dx * dx / (sigma_max * sigma_max);
    if mu_max > 0.0 {
        dt_max = dt_max.min(dx / mu_max);
    }
    let steps = match resolution.time_steps {
        Some(0) => return Err(Error::InvalidParams("time_steps must be positive".into())),
        Some(s) => {
            if 1.0 / s as f64 > dt_max * (1.0 + 1e-12) {
                return Err(Error::UnstableResolution(format!(
                    "dt = {:e} exceeds the stability bound {dt_max:e} (dx = {dx:e}); use at least {} time steps",
                    1.0 / s as f64,
                    (1.0 / dt_max).ceil()
                )));
            }
            s
        }
        None => (1.0 / (0.4 * dt_max)).ceil() as usize,
    };
    let dt = 1.0 / steps as f64;
    let snapshots_wanted = resolution.snapshots.max(2);

    let mut u: Vec<f64> = grid.iter().map(|x| terminal.eval(x)).collect();
    if u.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParams(format!("{}: terminal is not finite on the grid", terminal.name)));
    }
    let terminal_min = u.iter().copied().fold(f64::INFINITY, f64::min);
    let terminal_max = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (mut running_min, mut running_max) = (terminal_min, terminal_max);
    // bounded terminals: keep the extrapolated rows inside the terminal's range
    let clip = |v: f64| if terminal.is_bounded() { v.clamp(terminal_min, terminal_max) } else { v };
    let mut next = vec![0.0; points];
    let mut snapshots = vec![(1.0, u.clone())];
    let snapshot_at: Vec<usize> = (1..snapshots_wanted)
        .map(|j| ((j as f64 / (snapshots_wanted - 1) as f64) * steps as f64).round() as usize)
        .collect();
    let inv_dx2 = 1.0 / (dx * dx);
    let inv_2dx = 0.5 / dx;
    let last = points - 1;

    for step in 1..=steps {
        {
            let u = &u;
            match generator {
                Generator::Variance { interval, .. } => {
                    let v = *interval;
                    fill_indexed(&mut next[1..last], |k| {
                        let i = k + 1;
                        let d2 = (u[i + 1] - 2.0 * u[i] + u[i - 1]) * inv_dx2;
                        u[i] + dt * compute_g(d2, &v)
                    });
                }
                Generator::Mean { interval, side } => {
                    let (m, side) = (*interval, *side);
                    fill_indexed(&mut next[1..last], |k| {
                        let i = k + 1;
                        let d2 = (u[i + 1] - 2.0 * u[i] + u[i - 1]) * inv_dx2;
                        let d1 = (u[i + 1] - u[i - 1]) * inv_2dx;
                        u[i] + dt * (0.5 * d2 + compute_g_mean(d1, &m, side))
                    });
                }
            }
        }
        next[0] = clip(2.0 * next[1] - next[2]);
        next[last] = clip(2.0 * next[last - 1] - next[last - 2]);
        std::mem::swap(&mut u, &mut next);
        for &v in &u {
            running_min = running_min.min(v);
            running_max = running_max.max(v);
        }
        if snapshot_at.contains(&step) {
            snapshots.push((1.0 - step as f64 * dt, u.clone()));
        }
    }
    if let Some(last) = snapshots.last_mut() {
        last.0 = 0.0;
    }
    Ok(ValueGrid { grid, snapshots, time_steps: steps, dt, running_min, running_max, terminal_min, terminal_max })
}

/// Sublinear expectation E[φ(ξ)] of a G-normal ξ ~ N(0, [σ̲², σ̄²]) via the G-heat equation.
pub fn solve_g_heat(v: &VarianceInterval, terminal: &TestFunction, resolution: Resolution) -> Result<ValueGrid> {
    solve(&HjbProblem {
        generator: Generator::Variance { interval: *v, side: Side::Sup },
        terminal: terminal.clone(),
        resolution,
    })
}

/// g-expectation value Y₀ of φ(B₁) for drift uncertainty [μ̲, μ̄].
pub fn solve_g_expectation(
    m: &MeanInterval,
    terminal: &TestFunction,
    side: Side,
    resolution: Resolution,
) -> Result<ValueGrid> {
    solve(&HjbProblem { generator: Generator::Mean { interval: *m, side }, terminal: terminal.clone(), resolution })
}

/// One `name,value` row per scalar result.
pub fn scalar_table(rows: &[(String, f64)]) -> Table {
    let mut t = Table::new(&["name", "value"]);
    for (name, value) in rows {
        t.push(vec![Cell::from(name.as_str()), Cell::from(*value)]);
    }
    t
}
