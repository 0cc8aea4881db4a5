use super::*;
use crate::densities::{Envelope, MeanInterval, VarianceInterval};
use crate::numerics::{quad_integrate, std_normal_pdf};
use crate::sublinear::{named_terminal, s_shaped_terminal, Growth};

fn var_model(lo: f64, hi: f64, n: usize) -> RectangularModel {
    RectangularModel::new(
        ModelKind::VarianceUncertain { interval: VarianceInterval::new(lo, hi).unwrap() },
        Innovation::Rademacher,
        n,
    )
    .unwrap()
}

fn mean_model(lo: f64, hi: f64, sigma: f64, n: usize) -> RectangularModel {
    RectangularModel::new(
        ModelKind::MeanUncertain { interval: MeanInterval::new(lo, hi).unwrap(), sigma },
        Innovation::Rademacher,
        n,
    )
    .unwrap()
}

fn s_bar(c: f64) -> TestFunction {
    s_shaped_terminal("tanh", c, 0.5, Envelope::Phibar).unwrap()
}

fn dp(model: &RectangularModel, phi: &TestFunction, side: Side) -> DpOutcome {
    sup_expectation_dp(model, phi, &DpOptions::new(side)).unwrap()
}

#[test]
fn control_grids() {
    assert_eq!(mean_model(-0.5, 0.5, 1.0, 1).controls(false), vec![-0.5, -0.25, 0.0, 0.25, 0.5]);
    assert_eq!(mean_model(0.0, 0.0, 1.0, 1).controls(false), vec![0.0]);
    assert_eq!(var_model(1.0, 2.0, 1).controls(false), vec![1.0, 2.0]);
    assert_eq!(var_model(1.0, 2.0, 1).controls(true), vec![1.0, 1.25, 1.5, 1.75, 2.0]);
    assert_eq!(var_model(1.0, 1.0, 1).controls(true), vec![1.0]);
    assert_eq!(var_model(1.0, 2.0, 1).lattice_denominator(true), 4);
    assert_eq!(var_model(1.0, 2.0, 1).lattice_denominator(false), 1);
}

#[test]
fn innovation_validation() {
    let bad = Innovation::Discrete { values: vec![-1.0, 2.0], probs: vec![0.5, 0.5] };
    assert!(bad.validate().is_err());
    let ok = Innovation::Discrete { values: vec![-2.0, 0.0, 2.0], probs: vec![0.125, 0.75, 0.125] };
    ok.validate().unwrap();
}

#[test]
fn terminal_state_is_phi() {
    let m = var_model(1.0, 2.0, 10);
    let phi = named_terminal("gauss").unwrap();
    let grid = DpGrid { dx: 0.01, half: 500 };
    let s = DpState::terminal(&m, grid, &phi);
    assert_eq!(s.step, 10);
    assert!(s.values.iter().enumerate().all(|(i, &v)| v == phi.eval(grid.x(i))));
}

#[test]
fn degenerate_variance_matches_classical() {
    let phi = named_terminal("gauss").unwrap();
    let exact = quad_integrate(|y| phi.eval(y) * std_normal_pdf(y), -12.0, 12.0, 1e-13).unwrap().value;
    assert!((exact - 1.0 / 3f64.sqrt()).abs() < 1e-12);
    let out = dp(&var_model(1.0, 1.0, 400), &phi, Side::Sup);
    assert!((out.value - exact).abs() < 5e-3, "{}", out.value);
}

#[test]
fn one_step_mean_hand_computation() {
    let phi = named_terminal("gauss").unwrap();
    let out = dp(&mean_model(0.0, 0.0, 1.0, 1), &phi, Side::Sup);
    // statistic = ε + ε/√1 = ±2
    let hand = 0.5 * (phi.eval(2.0) + phi.eval(-2.0));
    assert!((out.value - hand).abs() < 1e-12);
}

#[test]
fn brute_force_equivalence_variance() {
    for c in [0.0, 0.5] {
        let phi = s_bar(c);
        for n in [1usize, 2, 5, 9, 12] {
            for side in [Side::Sup, Side::Inf] {
                let m = var_model(1.0, 2.0, n);
                let v = dp(&m, &phi, side).value;
                let b = brute_force_value(&m, &phi, side, false).unwrap();
                assert!((v - b).abs() <= 1e-12, "c={c} n={n} {side:?}: {v} vs {b}");
            }
        }
    }
}

#[test]
fn bang_bang_adequacy_at_centre_zero() {
    let phi = s_bar(0.0);
    for n in [8usize, 50, 400] {
        let m = var_model(1.0, 2.0, n);
        let two = dp(&m, &phi, Side::Sup).value;
        let five = sup_expectation_dp(&m, &phi, &DpOptions { enrich_controls: true, ..DpOptions::new(Side::Sup) })
            .unwrap()
            .value;
        assert!((two - five).abs() <= 1e-9, "n={n}: {two} vs {five}");
    }
}

#[test]
fn policy_attains_value_exactly() {
    // the recorded policy, evaluated over all 2^n paths, reproduces the DP value
    let phi = s_bar(0.5);
    for side in [Side::Sup, Side::Inf] {
        let m = var_model(1.0, 2.0, 8);
        let out = dp(&m, &phi, side);
        let policy = out.policy.unwrap();
        let mut total = 0.0;
        for mask in 0u32..(1 << m.n) {
            let mut y = 0.0;
            for step in 0..m.n {
                let u = policy.control(step, policy.grid.nearest(y));
                let e = if (mask >> step) & 1 == 1 { 1.0 } else { -1.0 };
                y += m.statistic_move(u, e);
            }
            total += phi.eval(y) / (1u32 << m.n) as f64;
        }
        assert!((total - out.value).abs() < 1e-12, "{side:?}");
    }
}

#[test]
fn rectangularity_against_all_adapted_policies() {
    // n = 4: every deterministic adapted policy (2^15 of them) evaluated exactly
    let phi = s_bar(0.5);
    let m = var_model(1.0, 2.0, 4);
    let sup = dp(&m, &phi, Side::Sup).value;
    let inf = dp(&m, &phi, Side::Inf).value;
    let (mut best, mut worst) = (f64::NEG_INFINITY, f64::INFINITY);
    for policy in 0u32..(1 << 15) {
        let mut total = 0.0;
        for path in 0u32..16 {
            let (mut y, mut node) = (0.0, 0usize);
            for step in 0..4 {
                let u = if (policy >> node) & 1 == 1 { 2.0 } else { 1.0 };
                let up = (path >> step) & 1;
                y += m.statistic_move(u, if up == 1 { 1.0 } else { -1.0 });
                node = 2 * node + 1 + up as usize;
            }
            total += phi.eval(y) / 16.0;
        }
        best = best.max(total);
        worst = worst.min(total);
    }
    assert!((best - sup).abs() < 1e-12 && (worst - inf).abs() < 1e-12);
}

#[test]
fn monotone_in_measure_set() {
    let phi = s_bar(0.5);
    let nested = [(1.0, 2.0), (0.8, 2.2), (0.5, 2.5)];
    let sups: Vec<f64> = nested.iter().map(|&(a, b)| dp(&var_model(a, b, 200), &phi, Side::Sup).value).collect();
    let infs: Vec<f64> = nested.iter().map(|&(a, b)| dp(&var_model(a, b, 200), &phi, Side::Inf).value).collect();
    assert!(sups.windows(2).all(|w| w[1] >= w[0]) && infs.windows(2).all(|w| w[1] <= w[0]), "{sups:?} {infs:?}");

    let gauss = named_terminal("gauss").unwrap();
    let nested = [(-0.25, 0.25), (-0.5, 0.5), (-1.0, 1.0)];
    let sups: Vec<f64> = nested.iter().map(|&(a, b)| dp(&mean_model(a, b, 1.0, 200), &gauss, Side::Sup).value).collect();
    let infs: Vec<f64> = nested.iter().map(|&(a, b)| dp(&mean_model(a, b, 1.0, 200), &gauss, Side::Inf).value).collect();
    assert!(sups.windows(2).all(|w| w[1] >= w[0]) && infs.windows(2).all(|w| w[1] <= w[0]), "{sups:?} {infs:?}");
    assert!(sups.iter().zip(&infs).all(|(s, i)| s >= i));
}

#[test]
fn lindeberg_values() {
    assert_eq!(lindeberg_condition_value(&var_model(1.0, 2.0, 100), 0.05).unwrap(), 0.0);
    assert_eq!(lindeberg_condition_value(&var_model(1.0, 2.0, 1), 1e-6).unwrap(), 4.0);
    // √(100·0.05) = 2.236 exceeds |μ| + 1 ≤ 2
    assert_eq!(lindeberg_condition_value(&mean_model(-1.0, 1.0, 1.0, 100), 0.05).unwrap(), 0.0);
    // four atoms {μ ± 1}, μ = ±1: the atom at ±2 exceeds √(100·0.01) = 1
    let v = lindeberg_condition_value(&mean_model(-1.0, 1.0, 1.0, 100), 0.01).unwrap();
    assert_eq!(v, 0.5 * 4.0);
}

#[test]
fn policy_simulation_checks() {
    let phi = s_bar(0.5);
    let m = var_model(1.0, 2.0, 50);
    let out = dp(&m, &phi, Side::Sup);
    let policy = out.policy.clone().unwrap();
    let spec = SeedSpec::new(3, 0);
    let est = policy_simulate(&m, &policy, &phi, 100_000, spec).unwrap();
    assert!((est.mean - out.value).abs() <= 3.0 * est.se, "{est:?} {}", out.value);
    assert_eq!(est, policy_simulate(&m, &policy, &phi, 100_000, spec).unwrap());
    assert!(matches!(policy_simulate(&m.with_n(49), &policy, &phi, 10, spec), Err(Error::PolicyMismatch(_))));
    assert!(matches!(
        policy_simulate(&var_model(1.2, 2.0, 50), &policy, &phi, 10, spec),
        Err(Error::PolicyMismatch(_))
    ));

    let gauss = named_terminal("gauss").unwrap();
    let mm = mean_model(-0.5, 0.5, 1.0, 100);
    let out = dp(&mm, &gauss, Side::Sup);
    let est = policy_simulate(&mm, out.policy.as_ref().unwrap(), &gauss, 100_000, spec).unwrap();
    assert!(est.mean <= out.value + 3.0 * est.se);
    // degenerate controls: the policy is irrelevant
    let flat = mean_model(0.0, 0.0, 1.0, 100);
    let out = dp(&flat, &gauss, Side::Sup);
    let est = policy_simulate(&flat, out.policy.as_ref().unwrap(), &gauss, 100_000, spec).unwrap();
    assert!((est.mean - out.value).abs() <= 3.0 * est.se);
}

#[test]
fn unbounded_terminal_rejected() {
    let abs = named_terminal("abs").unwrap();
    assert!(sup_expectation_dp(&var_model(1.0, 2.0, 10), &abs, &DpOptions::new(Side::Sup)).is_err());
}

#[test]
fn grid_too_coarse_is_reported() {
    let gauss = named_terminal("gauss").unwrap();
    let opts = DpOptions { target_points: 41, ..DpOptions::new(Side::Sup) };
    let r = sup_expectation_dp(&mean_model(-0.5, 0.5, 1.0, 100), &gauss, &opts);
    assert!(matches!(r, Err(Error::GridTooCoarse { .. })), "{r:?}");
}

#[test]
fn discrete_innovation_runs() {
    let three = Innovation::Discrete { values: vec![-2.0, 0.0, 2.0], probs: vec![0.125, 0.75, 0.125] };
    let m = RectangularModel::new(
        ModelKind::VarianceUncertain { interval: VarianceInterval::new(1.0, 2.0).unwrap() },
        three,
        6,
    )
    .unwrap();
    let phi = s_bar(0.0);
    let v = dp(&m, &phi, Side::Sup).value;
    assert!((v - brute_force_value(&m, &phi, Side::Sup, false).unwrap()).abs() < 1e-12);
    assert_eq!(lindeberg_condition_value(&m, 1e-6).unwrap(), 4.0);
}

#[test]
fn limit_sources() {
    let gauss = named_terminal("gauss").unwrap();
    let (v, src) = limit_value(&mean_model(-0.5, 0.5, 1.0, 1).kind, &gauss, Side::Sup).unwrap();
    assert!(matches!(src, LimitSource::ChenEpstein(_)));
    assert!((v - 0.7020778530770605).abs() < 1e-9);
    let (v, src) = limit_value(&var_model(1.0, 2.0, 1).kind, &s_bar(0.5), Side::Sup).unwrap();
    assert!(matches!(src, LimitSource::Cez(_)));
    assert!((v - 0.2900049854740785).abs() < 1e-9);
    // tanh with c < 0 has no curvature claim: falls back to the PDE
    let (_, src) = limit_value(&var_model(1.0, 2.0, 1).kind, &s_bar(-0.7), Side::Sup).unwrap();
    assert_eq!(src, LimitSource::Pde);
    let clip = TestFunction::new("clip", |x: f64| x.clamp(-1.0, 1.0), Growth::BoundedWithLimits { neg: -1.0, pos: 1.0 });
    let (_, src) = limit_value(&mean_model(-0.5, 0.5, 1.0, 1).kind, &clip, Side::Sup).unwrap();
    assert_eq!(src, LimitSource::Pde);
}

#[test]
fn convergence_table_layout() {
    let gauss = named_terminal("gauss").unwrap();
    let t = convergence_experiment(&mean_model(0.0, 0.0, 1.0, 1), &gauss, &[125, 2000], &DpOptions::new(Side::Sup))
        .unwrap();
    assert!(t.gap(2000).unwrap() < t.gap(125).unwrap());
    assert!(t.to_table().to_csv().starts_with("n,dp_value,limit_value,gap\n"));
}
