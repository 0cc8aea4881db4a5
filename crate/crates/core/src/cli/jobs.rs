use serde::de::DeserializeOwned;
use serde_json::Value;

use super::args::*;
use super::RunConfig;
use crate::classical::{self, IidLaw, IidModel};
use crate::densities::{
    emit_density_curve, emit_density_curves, total_mass, DensityCurve, DensityParams, Envelope, Family, MeanInterval,
    Side, VarianceInterval,
};
use crate::martingale::{self, MdsKind, DEFAULT_LEVY_EPS};
use crate::measure_set::{
    convergence_experiment, lindeberg_condition_value, policy_simulate, sup_expectation_dp, DpOptions, Innovation,
    ModelKind, RectangularModel,
};
use crate::numerics::{std_normal_pdf, Grid1D, SeedSpec};
use crate::report::{Cell, Table};
use crate::sublinear::{
    named_terminal, s_shaped_terminal, scalar_table, solve, tree_value_oracle, Generator, HjbProblem, Resolution,
    TestFunction,
};
use crate::Result;

const DEFAULT_DENSITY_GRID: &str = "-6:6:1201";
const DEFAULT_FIGURE_GRID: &str = "-6:6:1201";
const DEFAULT_SCHEDULE: [usize; 5] = [125, 250, 500, 1000, 2000];

/// α values of the Chen–Epstein figure sweeps (β = 0, c = 0).
pub const FIGURE_ALPHAS_NONPOSITIVE: [f64; 3] = [-1.0, -0.5, 0.0];
pub const FIGURE_ALPHAS_NONNEGATIVE: [f64; 3] = [0.0, 0.5, 1.0];
/// (σ̲, σ̄) of the q-density figures, with c = 0.
pub const FIGURE_SIGMAS: (f64, f64) = (1.0, 2.0);

/// A fully validated unit of work.
#[derive(Debug, Clone)]
pub enum Job {
    Density { family: Family, params: DensityParams, grid: Grid1D, abs_tol: f64 },
    Solve { problem: HjbProblem, tree_steps: Option<usize> },
    Converge { template: RectangularModel, terminal: TestFunction, schedule: Vec<usize>, opts: DpOptions },
    CheckClassical { model: IidModel, ns: Vec<usize>, eps: f64 },
    CheckMartingale { kind: MdsKind, ns: Vec<usize>, eps: f64, reps: usize },
    CheckLindeberg { template: RectangularModel, ns: Vec<usize>, eps: f64 },
    SimulateClt { model: IidModel, n: usize, reps: usize },
    SimulateHall { eta_values: Vec<f64>, eta_probs: Vec<f64>, k_n: usize, reps: usize },
    SimulatePolicy { model: RectangularModel, terminal: TestFunction, opts: DpOptions, reps: usize },
    Figures { grid: Grid1D },
}

#[derive(Default)]
struct Checks(Vec<String>);

impl Checks {
    fn take<T>(&mut self, r: Result<T>) -> Option<T> {
        r.map_err(|e| self.0.push(e.to_string())).ok()
    }

    fn need<T>(&mut self, v: Option<T>, key: &str, context: &str) -> Option<T> {
        if v.is_none() {
            self.0.push(format!("{key} is required for {context}"));
        }
        v
    }

    fn require(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.0.push(msg());
        }
    }

    fn unused(&mut self, context: &str, keys: &[(&str, bool)]) {
        for (key, present) in keys {
            if *present {
                self.0.push(format!("{key} is not used by {context}"));
            }
        }
    }
}

fn parse_params<T: DeserializeOwned>(cfg: &RunConfig) -> std::result::Result<T, Vec<String>> {
    serde_json::from_value(Value::Object(cfg.params.clone()))
        .map_err(|e| vec![format!("params for `{}`: {e}", cfg.command)])
}

/// Validates a config into a [`Job`], or lists every violation found.
pub(crate) fn plan(cfg: &RunConfig) -> std::result::Result<Job, Vec<String>> {
    let mut ck = Checks::default();
    let job = match cfg.command.as_str() {
        "density" => plan_density(parse_params(cfg)?, &mut ck),
        "solve" => plan_solve(parse_params(cfg)?, &mut ck),
        "converge" => plan_converge(parse_params(cfg)?, &mut ck),
        "check" => plan_check(parse_params(cfg)?, &mut ck),
        "simulate" => plan_simulate(parse_params(cfg)?, &mut ck),
        "figures" => plan_figures(parse_params(cfg)?, &mut ck),
        other => {
            return Err(vec![format!("unknown command `{other}`; expected one of {}", super::COMMANDS.join(", "))])
        }
    };
    match job {
        Some(job) if ck.0.is_empty() => Ok(job),
        _ => Err(ck.0),
    }
}

fn side_of(s: Option<SideArg>) -> Side {
    match s.unwrap_or(SideArg::Sup) {
        SideArg::Sup => Side::Sup,
        SideArg::Inf => Side::Inf,
    }
}

fn grid_of(spec: Option<&str>, default: &str, ck: &mut Checks) -> Option<Grid1D> {
    ck.take(Grid1D::parse(spec.unwrap_or(default)))
}

fn check_ns(ns: &[usize], key: &str, ck: &mut Checks) {
    ck.require(!ns.is_empty(), || format!("{key} must not be empty"));
    ck.require(ns.iter().all(|&n| n >= 1), || format!("{key} entries must be >= 1"));
}

fn check_eps(eps: f64, ck: &mut Checks) {
    ck.require(eps > 0.0 && eps.is_finite(), || format!("eps > 0 required, got {eps}"));
}

struct TerminalFields<'a> {
    terminal: Option<&'a str>,
    phi1: Option<&'a str>,
    c: Option<f64>,
    theta: Option<f64>,
    envelope: Option<EnvelopeArg>,
}

/// Builds the terminal. `theta_from_interval` is σ̲/σ̄ in the variance case,
/// which fixes θ for S-shaped terminals.
fn terminal_of(f: TerminalFields, theta_from_interval: Option<f64>, ck: &mut Checks) -> Option<TestFunction> {
    let name = ck.need(f.terminal, "terminal", "this command")?;
    if name != "s-shaped" {
        ck.unused(
            "a named terminal",
            &[("phi1", f.phi1.is_some()), ("theta", f.theta.is_some()), ("envelope", f.envelope.is_some())],
        );
        ck.require(f.c.is_none_or(|c| c == 0.0), || "c applies only to s-shaped terminals".into());
        return ck.take(named_terminal(name));
    }
    let theta = match (f.theta, theta_from_interval) {
        (Some(t), Some(r)) => {
            ck.require((t - r).abs() <= 1e-12, || {
                format!("SShapeSpec: theta must equal sigma_low/sigma_high = {r}, got {t}")
            });
            t
        }
        (Some(t), None) => t,
        (None, Some(r)) => r,
        (None, None) => ck.need(None, "theta", "an s-shaped terminal without a variance interval")?,
    };
    let envelope = match f.envelope.unwrap_or(EnvelopeArg::Phibar) {
        EnvelopeArg::Phi => Envelope::Phi,
        EnvelopeArg::Phibar => Envelope::Phibar,
    };
    ck.take(s_shaped_terminal(f.phi1.unwrap_or("tanh"), f.c.unwrap_or(0.0), theta, envelope))
}

struct ModelFields<'a> {
    kind: Option<KindArg>,
    sigma_low: Option<f64>,
    sigma_high: Option<f64>,
    mu_low: Option<f64>,
    mu_high: Option<f64>,
    sigma: Option<f64>,
    innovation_values: Option<&'a [f64]>,
    innovation_probs: Option<&'a [f64]>,
}

/// Returns the model (with n = 1) and σ̲/σ̄ in the variance case.
fn model_of(f: ModelFields, ck: &mut Checks) -> Option<(RectangularModel, Option<f64>)> {
    let kind = ck.need(f.kind, "kind", "a rectangular model")?;
    let (model_kind, ratio) = match kind {
        KindArg::Mean => {
            ck.unused("kind = mean", &[("sigma_low", f.sigma_low.is_some()), ("sigma_high", f.sigma_high.is_some())]);
            let lo = ck.need(f.mu_low, "mu_low", "kind = mean");
            let hi = ck.need(f.mu_high, "mu_high", "kind = mean");
            let interval = ck.take(MeanInterval::new(lo?, hi?))?;
            (ModelKind::MeanUncertain { interval, sigma: f.sigma.unwrap_or(1.0) }, None)
        }
        KindArg::Variance => {
            ck.unused(
                "kind = variance",
                &[("mu_low", f.mu_low.is_some()), ("mu_high", f.mu_high.is_some()), ("sigma", f.sigma.is_some())],
            );
            let lo = ck.need(f.sigma_low, "sigma_low", "kind = variance");
            let hi = ck.need(f.sigma_high, "sigma_high", "kind = variance");
            let interval = ck.take(VarianceInterval::new(lo?, hi?))?;
            (ModelKind::VarianceUncertain { interval }, Some(interval.theta()))
        }
    };
    let innovation = match (f.innovation_values, f.innovation_probs) {
        (None, None) => Innovation::Rademacher,
        (Some(v), Some(p)) => Innovation::Discrete { values: v.to_vec(), probs: p.to_vec() },
        _ => {
            ck.0.push("innovation_values and innovation_probs must be given together".into());
            return None;
        }
    };
    let model = ck.take(RectangularModel::new(model_kind, innovation, 1))?;
    Some((model, ratio))
}

fn dp_options(side: Option<SideArg>, enrich: Option<bool>, target_points: Option<usize>, ck: &mut Checks) -> DpOptions {
    let mut opts = DpOptions::new(side_of(side));
    opts.enrich_controls = enrich.unwrap_or(false);
    if let Some(t) = target_points {
        ck.require(t >= 5, || format!("target_points must be >= 5, got {t}"));
        opts.target_points = t;
    }
    opts
}

fn law_of(
    law: Option<LawArg>,
    p: Option<f64>,
    values: Option<&[f64]>,
    probs: Option<&[f64]>,
    ck: &mut Checks,
) -> Option<IidLaw> {
    match law.unwrap_or(LawArg::Rademacher) {
        LawArg::Rademacher => Some(IidLaw::Rademacher),
        LawArg::Bernoulli => Some(IidLaw::Bernoulli { p: ck.need(p, "p", "law = bernoulli")? }),
        LawArg::Discrete => {
            let values = ck.need(values, "values", "law = discrete");
            let probs = ck.need(probs, "probs", "law = discrete");
            Some(IidLaw::Discrete { values: values?.to_vec(), probs: probs?.to_vec() })
        }
    }
}

fn plan_density(a: DensityArgs, ck: &mut Checks) -> Option<Job> {
    let family = match a.family.unwrap_or(FamilyArg::ChenEpstein) {
        FamilyArg::ChenEpstein => Family::ChenEpstein,
        FamilyArg::Cez => Family::Cez,
    };
    let (alpha, beta) = match family {
        Family::ChenEpstein => (a.alpha.unwrap_or(0.0), a.beta.unwrap_or(0.0)),
        Family::Cez => (ck.need(a.alpha, "alpha", "family = cez")?, ck.need(a.beta, "beta", "family = cez")?),
    };
    let params = DensityParams::new(alpha, beta, a.c.unwrap_or(0.0));
    ck.require([alpha, beta, params.c].iter().all(|v| v.is_finite()), || "DensityParams must be finite".into());
    if family == Family::Cez {
        ck.take(params.check_cez());
    }
    let abs_tol = a.abs_tol.unwrap_or(1e-10);
    ck.require(abs_tol > 0.0, || format!("abs_tol > 0 required, got {abs_tol}"));
    let grid = grid_of(a.grid.as_deref(), DEFAULT_DENSITY_GRID, ck)?;
    Some(Job::Density { family, params, grid, abs_tol })
}

fn plan_solve(a: SolveArgs, ck: &mut Checks) -> Option<Job> {
    let side = side_of(a.side);
    let generator = ck.need(a.generator, "generator", "solve (g-heat or g-expectation)");
    let (generator, ratio) = match generator {
        Some(GeneratorArg::GHeat) => {
            ck.unused("g-heat", &[("mu_low", a.mu_low.is_some()), ("mu_high", a.mu_high.is_some())]);
            let lo = ck.need(a.sigma_low, "sigma_low", "g-heat");
            let hi = ck.need(a.sigma_high, "sigma_high", "g-heat");
            match (lo, hi) {
                (Some(lo), Some(hi)) => match ck.take(VarianceInterval::new(lo, hi)) {
                    Some(interval) => (Some(Generator::Variance { interval, side }), Some(interval.theta())),
                    None => (None, None),
                },
                _ => (None, None),
            }
        }
        Some(GeneratorArg::GExpectation) => {
            ck.unused("g-expectation", &[("sigma_low", a.sigma_low.is_some()), ("sigma_high", a.sigma_high.is_some())]);
            let lo = ck.need(a.mu_low, "mu_low", "g-expectation");
            let hi = ck.need(a.mu_high, "mu_high", "g-expectation");
            match (lo, hi) {
                (Some(lo), Some(hi)) => (ck.take(MeanInterval::new(lo, hi)).map(|interval| Generator::Mean { interval, side }), None),
                _ => (None, None),
            }
        }
        None => (None, None),
    };
    let fields = TerminalFields {
        terminal: a.terminal.as_deref(),
        phi1: a.phi1.as_deref(),
        c: a.c,
        theta: a.theta,
        envelope: a.envelope,
    };
    let terminal = terminal_of(fields, ratio, ck);
    if let (Some(Generator::Mean { .. }), Some(t)) = (&generator, &terminal) {
        ck.require(t.is_bounded(), || format!("terminal `{}` must be bounded for g-expectation", t.name));
    }
    let mut resolution = Resolution::default();
    if let Some(p) = a.space_points {
        resolution.space_points = p;
    }
    let p = resolution.space_points;
    ck.require(p >= 5 && p % 2 == 1, || format!("space_points must be odd and >= 5, got {p}"));
    if let Some(h) = a.domain_halfwidth {
        ck.require(h > 0.0 && h.is_finite(), || format!("domain_halfwidth must be positive, got {h}"));
        resolution.domain_halfwidth = Some(h);
    }
    if let Some(s) = a.time_steps {
        ck.require(s >= 1, || "time_steps must be >= 1".into());
        resolution.time_steps = Some(s);
    }
    if let Some(s) = a.snapshots {
        ck.require(s >= 2, || format!("snapshots must be >= 2, got {s}"));
        resolution.snapshots = s;
    }
    if let Some(s) = a.tree_steps {
        ck.require(s >= 1, || "tree_steps must be >= 1".into());
    }
    Some(Job::Solve { problem: HjbProblem { generator: generator?, terminal: terminal?, resolution }, tree_steps: a.tree_steps })
}

fn plan_converge(a: ConvergeArgs, ck: &mut Checks) -> Option<Job> {
    let model = model_of(
        ModelFields {
            kind: a.kind,
            sigma_low: a.sigma_low,
            sigma_high: a.sigma_high,
            mu_low: a.mu_low,
            mu_high: a.mu_high,
            sigma: a.sigma,
            innovation_values: a.innovation_values.as_deref(),
            innovation_probs: a.innovation_probs.as_deref(),
        },
        ck,
    );
    let ratio = model.as_ref().and_then(|m| m.1);
    let fields = TerminalFields {
        terminal: a.terminal.as_deref(),
        phi1: a.phi1.as_deref(),
        c: a.c,
        theta: a.theta,
        envelope: a.envelope,
    };
    let terminal = terminal_of(fields, ratio, ck);
    if let Some(t) = &terminal {
        ck.require(t.is_bounded(), || format!("terminal `{}` must be bounded for the DP", t.name));
    }
    let schedule = a.schedule.unwrap_or_else(|| DEFAULT_SCHEDULE.to_vec());
    check_ns(&schedule, "schedule", ck);
    let opts = dp_options(a.side, a.enrich_controls, a.target_points, ck);
    Some(Job::Converge { template: model?.0, terminal: terminal?, schedule, opts })
}

fn plan_check(a: CheckArgs, ck: &mut Checks) -> Option<Job> {
    let target = ck.need(a.target, "target", "check (classical, martingale or lindeberg)")?;
    let eps = a.eps.unwrap_or(match target {
        CheckTarget::Martingale => DEFAULT_LEVY_EPS,
        _ => 0.1,
    });
    check_eps(eps, ck);
    match target {
        CheckTarget::Classical => {
            let ns = a.ns.unwrap_or_else(|| vec![10, 100, 1000, 10_000]);
            check_ns(&ns, "ns", ck);
            let law = law_of(a.law, a.p, a.values.as_deref(), a.probs.as_deref(), ck)?;
            let model = ck.take(IidModel::new(law, a.delta.unwrap_or(1.0)))?;
            Some(Job::CheckClassical { model, ns, eps })
        }
        CheckTarget::Martingale => {
            let ns = a.ns.unwrap_or_else(|| vec![100, 1000]);
            check_ns(&ns, "ns", ck);
            let reps = a.reps.unwrap_or(1000);
            ck.require(reps >= 100, || format!("reps must be >= 100, got {reps}"));
            let kind = match a.model.unwrap_or(MdsArg::IidRademacher) {
                MdsArg::IidRademacher => MdsKind::IidRademacher,
                MdsArg::HallMixture => {
                    let v = ck.need(a.eta_values, "eta_values", "model = hall-mixture");
                    let p = ck.need(a.eta_probs, "eta_probs", "model = hall-mixture");
                    MdsKind::HallMixture { eta_values: v?, eta_probs: p? }
                }
                MdsArg::VarFeedback => {
                    let init = ck.need(a.init, "init", "model = var-feedback");
                    let pos = ck.need(a.pos, "pos", "model = var-feedback");
                    let neg = ck.need(a.neg, "neg", "model = var-feedback");
                    MdsKind::VarFeedback { init: init?, pos: pos?, neg: neg? }
                }
            };
            ck.take(kind.validate())?;
            Some(Job::CheckMartingale { kind, ns, eps, reps })
        }
        CheckTarget::Lindeberg => {
            let ns = a.ns.unwrap_or_else(|| vec![10, 100, 1000]);
            check_ns(&ns, "ns", ck);
            let fields = ModelFields {
                kind: a.kind,
                sigma_low: a.sigma_low,
                sigma_high: a.sigma_high,
                mu_low: a.mu_low,
                mu_high: a.mu_high,
                sigma: a.sigma,
                innovation_values: a.innovation_values.as_deref(),
                innovation_probs: a.innovation_probs.as_deref(),
            };
            let (template, _) = model_of(fields, ck)?;
            Some(Job::CheckLindeberg { template, ns, eps })
        }
    }
}

fn plan_simulate(a: SimulateArgs, ck: &mut Checks) -> Option<Job> {
    let target = ck.need(a.target, "target", "simulate (clt, hall or policy)")?;
    let reps = a.reps.unwrap_or(10_000);
    match target {
        SimulateTarget::Clt => {
            ck.require(reps >= 100, || format!("reps must be >= 100, got {reps}"));
            let n = a.n.unwrap_or(1000);
            ck.require(n >= 1, || "n must be >= 1".into());
            let law = law_of(a.law, a.p, a.values.as_deref(), a.probs.as_deref(), ck)?;
            let model = ck.take(IidModel::new(law, 1.0))?;
            Some(Job::SimulateClt { model, n, reps })
        }
        SimulateTarget::Hall => {
            ck.require(reps >= 1000, || format!("reps must be >= 1000, got {reps}"));
            let k_n = a.k_n.unwrap_or(1000);
            ck.require(k_n >= 100, || format!("k_n must be >= 100, got {k_n}"));
            let v = ck.need(a.eta_values, "eta_values", "target = hall");
            let p = ck.need(a.eta_probs, "eta_probs", "target = hall");
            let (eta_values, eta_probs) = (v?, p?);
            ck.take(MdsKind::HallMixture { eta_values: eta_values.clone(), eta_probs: eta_probs.clone() }.validate())?;
            Some(Job::SimulateHall { eta_values, eta_probs, k_n, reps })
        }
        SimulateTarget::Policy => {
            ck.require(reps >= 1, || "reps must be >= 1".into());
            let n = a.n.unwrap_or(100);
            ck.require(n >= 1, || "n must be >= 1".into());
            let model = model_of(
                ModelFields {
                    kind: a.kind,
                    sigma_low: a.sigma_low,
                    sigma_high: a.sigma_high,
                    mu_low: a.mu_low,
                    mu_high: a.mu_high,
                    sigma: a.sigma,
                    innovation_values: a.innovation_values.as_deref(),
                    innovation_probs: a.innovation_probs.as_deref(),
                },
                ck,
            );
            let ratio = model.as_ref().and_then(|m| m.1);
            let fields = TerminalFields {
                terminal: a.terminal.as_deref(),
                phi1: a.phi1.as_deref(),
                c: a.c,
                theta: a.theta,
                envelope: a.envelope,
            };
            let terminal = terminal_of(fields, ratio, ck);
            if let Some(t) = &terminal {
                ck.require(t.is_bounded(), || format!("terminal `{}` must be bounded for the DP", t.name));
            }
            let mut opts = dp_options(a.side, a.enrich_controls, a.target_points, ck);
            opts.record_policy = true;
            Some(Job::SimulatePolicy { model: model?.0.with_n(n.max(1)), terminal: terminal?, opts, reps })
        }
    }
}

fn plan_figures(a: FiguresArgs, ck: &mut Checks) -> Option<Job> {
    let _ = a.set.unwrap_or(FigureSet::Paper);
    let grid = grid_of(a.grid.as_deref(), DEFAULT_FIGURE_GRID, ck)?;
    Some(Job::Figures { grid })
}

fn named(name: &str, t: Table) -> (String, Table) {
    (name.to_string(), t)
}

/// Side-by-side curves on a shared grid: `y,<label>...`.
fn wide_table(labels: &[String], curves: &[DensityCurve]) -> Table {
    let mut header = vec!["y"];
    header.extend(labels.iter().map(String::as_str));
    let mut t = Table::new(&header);
    for (i, &(y, _)) in curves[0].rows.iter().enumerate() {
        let mut row = vec![Cell::Num(y)];
        row.extend(curves.iter().map(|c| Cell::Num(c.rows[i].1)));
        t.push(row);
    }
    t
}

fn alpha_sweep(alphas: &[f64], grid: &Grid1D) -> Result<Table> {
    let sweep: Vec<_> = alphas.iter().map(|&a| (DensityParams::new(a, 0.0, 0.0), Family::ChenEpstein)).collect();
    let curves = emit_density_curves(&sweep, grid)?;
    let labels: Vec<String> = alphas.iter().map(|a| format!("alpha={}", crate::report::format_number(*a))).collect();
    Ok(wide_table(&labels, &curves))
}

impl Job {
    /// Runs the job and returns the named output tables. Nothing is written here.
    pub fn execute(&self, spec: SeedSpec) -> Result<Vec<(String, Table)>> {
        match self {
            Job::Density { family, params, grid, abs_tol } => {
                let curve = emit_density_curve(params, *family, grid)?;
                let mass = total_mass(*family, params, *abs_tol)?;
                let summary = scalar_table(&[
                    ("total_mass".into(), mass.value),
                    ("mass_error_estimate".into(), mass.err_estimate),
                    ("abs_tol".into(), *abs_tol),
                ]);
                Ok(vec![named("density.csv", curve.to_table()), named("density_summary.csv", summary)])
            }
            Job::Solve { problem, tree_steps } => {
                let grid = solve(problem)?;
                let mut rows = vec![
                    ("root_value".to_string(), grid.root_value()),
                    ("time_steps".to_string(), grid.time_steps as f64),
                    ("dt".to_string(), grid.dt),
                    ("domain_halfwidth".to_string(), grid.grid.hi()),
                ];
                if let Some(steps) = tree_steps {
                    rows.push(("tree_value".into(), tree_value_oracle(problem, *steps)?));
                }
                Ok(vec![named("solve_grid.csv", grid.to_table()), named("solve_value.csv", scalar_table(&rows))])
            }
            Job::Converge { template, terminal, schedule, opts } => {
                let table = convergence_experiment(template, terminal, schedule, opts)?;
                Ok(vec![named("converge.csv", table.to_table())])
            }
            Job::CheckClassical { model, ns, eps } => {
                Ok(vec![named("check_classical.csv", classical::condition_report(model, ns, *eps)?)])
            }
            Job::CheckMartingale { kind, ns, eps, reps } => {
                Ok(vec![named("check_martingale.csv", martingale::condition_report(kind, ns, *eps, *reps, spec)?)])
            }
            Job::CheckLindeberg { template, ns, eps } => {
                let mut t = Table::new(&["n", "eps", "value"]);
                for &n in ns {
                    let v = lindeberg_condition_value(&template.with_n(n), *eps)?;
                    t.push(vec![n.into(), (*eps).into(), v.into()]);
                }
                Ok(vec![named("check_lindeberg.csv", t)])
            }
            Job::SimulateClt { model, n, reps } => {
                let ks = classical::simulate_clt_distance(model, *n, *reps, spec)?;
                Ok(vec![named("simulate_clt.csv", scalar_table(&[("ks_distance".into(), ks)]))])
            }
            Job::SimulateHall { eta_values, eta_probs, k_n, reps } => {
                let h = martingale::hall_convergence_check(eta_values, eta_probs, *k_n, *reps, spec)?;
                let rows = [("ks_closed_form".into(), h.ks_closed_form), ("ks_two_sample".into(), h.ks_two_sample)];
                Ok(vec![named("simulate_hall.csv", scalar_table(&rows))])
            }
            Job::SimulatePolicy { model, terminal, opts, reps } => {
                let dp = sup_expectation_dp(model, terminal, opts)?;
                let policy = dp.policy.as_ref().expect("policy recorded");
                let mc = policy_simulate(model, policy, terminal, *reps, spec)?;
                let rows = [
                    ("dp_value".into(), dp.value),
                    ("grid_error".into(), dp.grid_error),
                    ("mc_mean".into(), mc.mean),
                    ("mc_se".into(), mc.se),
                ];
                Ok(vec![named("simulate_policy.csv", scalar_table(&rows))])
            }
            Job::Figures { grid } => figure_tables(grid),
        }
    }
}

/// The five figure tables: two Chen–Epstein α sweeps, the q pair, and the
/// q pair against normal densities with the same extreme variances.
pub fn figure_tables(grid: &Grid1D) -> Result<Vec<(String, Table)>> {
    let (lo, hi) = FIGURE_SIGMAS;
    let q_pair = [(DensityParams::new(lo, hi, 0.0), Family::Cez), (DensityParams::new(hi, lo, 0.0), Family::Cez)];
    let q = emit_density_curves(&q_pair, grid)?;
    let q_label = |p: &DensityParams| {
        format!("q_{}_{}_{}", crate::report::format_number(p.alpha), crate::report::format_number(p.beta), 0)
    };

    let mut overlay = Table::new(&["y", &q_label(&q[0].params), &q_label(&q[1].params), "normal_sd_low", "normal_sd_high"]);
    for (i, &(y, a)) in q[0].rows.iter().enumerate() {
        let b = q[1].rows[i].1;
        let n_lo = std_normal_pdf(y / lo) / lo;
        let n_hi = std_normal_pdf(y / hi) / hi;
        overlay.push(vec![y.into(), a.into(), b.into(), n_lo.into(), n_hi.into()]);
    }
    Ok(vec![
        named("figure1_ce_alpha_nonpositive.csv", alpha_sweep(&FIGURE_ALPHAS_NONPOSITIVE, grid)?),
        named("figure2_ce_alpha_nonnegative.csv", alpha_sweep(&FIGURE_ALPHAS_NONNEGATIVE, grid)?),
        named("figure3_q_low_high.csv", q[0].to_table()),
        named("figure4_q_high_low.csv", q[1].to_table()),
        named("figure5_q_vs_normal.csv", overlay),
    ])
}
