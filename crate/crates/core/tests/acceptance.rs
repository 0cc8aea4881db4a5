//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero
//! if any criterion fails.

use std::path::Path;
use std::time::{Duration, Instant};

use nlclt::classical::{binomial_standardized_prob, laplace_approx, laplace_exact, lyapunov_statistic, IidModel, LaplaceParams};
use nlclt::cli::{self, RunConfig};
use nlclt::densities::{
    cez_pdf, chen_epstein_pdf, emit_density_curve, total_mass, DensityParams, Envelope, Family, MeanInterval, Side,
    VarianceInterval,
};
use nlclt::martingale::{hall_convergence_check, mcleish_product_mean, MdsKind, MdsModel};
use nlclt::measure_set::{
    brute_force_value, convergence_experiment, sup_expectation_dp, DpOptions, Innovation, LimitSource, ModelKind,
    RectangularModel,
};
use nlclt::numerics::{std_normal_pdf, Grid1D, SeedSpec};
use nlclt::sublinear::{
    named_terminal, s_shaped_terminal, solve, solve_g_expectation, solve_g_heat, tree_value_oracle, Generator,
    HjbProblem, Resolution, TestFunction,
};
use num_complex::Complex64;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn vi(lo: f64, hi: f64) -> VarianceInterval {
    VarianceInterval::new(lo, hi).unwrap()
}

fn mi(lo: f64, hi: f64) -> MeanInterval {
    MeanInterval::new(lo, hi).unwrap()
}

fn criterion_1() -> Outcome {
    let mut worst_ce: f64 = 0.0;
    let mut worst_q: f64 = 0.0;
    let mut count = (0, 0);
    for alpha in [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0] {
        for beta in [-1.0, 0.0, 1.0] {
            for c in [-1.0, 0.0, 1.0] {
                let m = total_mass(Family::ChenEpstein, &DensityParams::new(alpha, beta, c), 1e-10).unwrap();
                worst_ce = worst_ce.max((m.value - 1.0).abs());
                count.0 += 1;
            }
        }
    }
    for alpha in [0.5, 1.0, 2.0] {
        for beta in [0.5, 1.0, 2.0] {
            for c in [-1.0, 0.0, 1.0] {
                let m = total_mass(Family::Cez, &DensityParams::new(alpha, beta, c), 1e-10).unwrap();
                worst_q = worst_q.max((m.value - 1.0).abs());
                count.1 += 1;
            }
        }
    }
    outcome(
        count == (63, 27) && worst_ce <= 1e-6 && worst_q <= 1e-6,
        format!(
            "{} f lattice points max |mass-1| = {worst_ce:.2e}; {} q lattice points max |mass-1| = {worst_q:.2e} (tol 1e-6)",
            count.0, count.1
        ),
    )
}

fn criterion_2() -> Outcome {
    let grid = Grid1D::new(-8.0, 8.0, 16_001).unwrap();
    let mut worst_f: f64 = 0.0;
    for beta in [-1.0, 0.0, 1.0] {
        for c in [-1.0, 0.0, 1.0] {
            let p = DensityParams::new(0.0, beta, c);
            for y in grid.iter() {
                worst_f = worst_f.max((chen_epstein_pdf(&p, y) - std_normal_pdf(y - beta)).abs());
            }
        }
    }
    let mut worst_q: f64 = 0.0;
    for sigma in [0.5, 1.0, 2.0] {
        for c in [-1.0, 0.0, 1.0] {
            let p = DensityParams::new(sigma, sigma, c);
            for y in grid.iter() {
                let normal = std_normal_pdf(y / sigma) / sigma;
                worst_q = worst_q.max((cez_pdf(&p, y).unwrap() - normal).abs());
            }
        }
    }
    outcome(
        worst_f <= 1e-12 && worst_q <= 1e-12,
        format!("sup|f^(0,b,c) - N(b,1)| = {worst_f:.2e}; sup|q^(s,s,c) - N(0,s^2)| = {worst_q:.2e} on [-8,8] (tol 1e-12)"),
    )
}

fn criterion_3() -> Outcome {
    // 30-digit evaluations of φ(0)e^{−α²/2} − αΦ(−α).
    const SPIKE: f64 = 0.697796557401306029593532746901;
    const BINORMAL_AT_ZERO: f64 = 0.0833154705876862983830627385676;
    let spike = chen_epstein_pdf(&DensityParams::new(-0.5, 0.0, 0.0), 0.0);
    let at_zero = chen_epstein_pdf(&DensityParams::new(1.0, 0.0, 0.0), 0.0);
    let grid = Grid1D::new(-8.0, 8.0, 16_001).unwrap();
    let curve = emit_density_curve(&DensityParams::new(1.0, 0.0, 0.0), Family::ChenEpstein, &grid).unwrap();
    let maxima = curve.local_maxima().len();
    let pass = spike > std_normal_pdf(0.0)
        && (spike - SPIKE).abs() <= 1e-4
        && (at_zero - BINORMAL_AT_ZERO).abs() <= 1e-4
        && maxima == 2;
    outcome(
        pass,
        format!(
            "f^(-0.5,0,0)(0) = {spike:.6} > {:.4}, oracle err {:.1e}; f^(1,0,0)(0) oracle err {:.1e}; {maxima} local maxima on 1e-3 grid",
            std_normal_pdf(0.0),
            (spike - SPIKE).abs(),
            (at_zero - BINORMAL_AT_ZERO).abs()
        ),
    )
}

fn criterion_4() -> Outcome {
    let prob = binomial_standardized_prob(10_000, 0.5, -1.96, 1.96).unwrap();
    let lp = LaplaceParams::new(100, 0.5, 0.0, 0.0).unwrap();
    let approx = laplace_approx(&lp).unwrap();
    let exact = laplace_exact(&lp).unwrap();
    let rademacher = IidModel::rademacher(1.0);
    let mut lyapunov_err: f64 = 0.0;
    for n in [1usize, 4, 25, 100, 10_000, 1_000_000] {
        let v = lyapunov_statistic(&rademacher, n).unwrap();
        lyapunov_err = lyapunov_err.max((v - 1.0 / (n as f64).sqrt()).abs());
    }
    let pass = (prob - 0.95).abs() <= 0.006
        && (approx - exact).abs() <= 5e-4
        && (exact - 0.0796).abs() <= 5e-5
        && lyapunov_err == 0.0;
    outcome(
        pass,
        format!(
            "|P - 0.95| = {:.2e} (tol 6e-3); laplace approx {approx:.6} vs exact {exact:.6} (tol 5e-4); lyapunov max err {lyapunov_err:e}",
            (prob - 0.95).abs()
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut worst_z: f64 = 0.0;
    let mut ok = true;
    let models = [
        MdsKind::IidRademacher,
        MdsKind::HallMixture { eta_values: vec![1.0, 2.0], eta_probs: vec![0.5, 0.5] },
        MdsKind::VarFeedback { init: 1.0, pos: 0.5, neg: 1.5 },
    ];
    for (i, kind) in models.iter().enumerate() {
        let model = MdsModel::new(kind.clone(), 10).unwrap();
        for t in [0.5, 1.0, 2.0] {
            let e = mcleish_product_mean(&model, t, 10_000, SeedSpec::new(2024, i as u32)).unwrap();
            ok &= e.within(Complex64::new(1.0, 0.0), 3.0);
            worst_z = worst_z.max((e.mean_re - 1.0).abs() / e.se_re).max(e.mean_im.abs() / e.se_im);
        }
    }
    let hall = hall_convergence_check(&[1.0, 2.0], &[0.5, 0.5], 10_000, 100_000, SeedSpec::new(2024, 7)).unwrap();
    ok &= hall.ks_closed_form <= 0.01;
    outcome(
        ok,
        format!(
            "McLeish max |dev|/SE = {worst_z:.2} (tol 3); Hall KS vs closed form = {:.4} (tol 0.01), two-sample {:.4}",
            hall.ks_closed_form, hall.ks_two_sample
        ),
    )
}

fn acceptance_problems() -> Vec<(&'static str, HjbProblem)> {
    let r = Resolution::default();
    let var = |lo, hi| Generator::Variance { interval: vi(lo, hi), side: Side::Sup };
    let problem = |generator, terminal: TestFunction| HjbProblem { generator, terminal, resolution: r };
    vec![
        ("degenerate", problem(var(1.0, 1.0), named_terminal("gauss-half").unwrap())),
        ("convex", problem(var(1.0, 2.0), named_terminal("abs").unwrap())),
        ("concave", problem(var(1.0, 2.0), named_terminal("neg-abs").unwrap())),
        (
            "increasing",
            problem(Generator::Mean { interval: mi(0.0, 0.5), side: Side::Sup }, named_terminal("normal-cdf").unwrap()),
        ),
        (
            "symmetric-decreasing",
            problem(Generator::Mean { interval: mi(-0.5, 0.5), side: Side::Sup }, named_terminal("gauss").unwrap()),
        ),
        ("s-shaped", problem(var(1.0, 2.0), s_shaped_terminal("tanh", 0.5, 0.5, Envelope::Phibar).unwrap())),
    ]
}

fn criterion_6() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (name, p) in acceptance_problems() {
        let pde = solve(&p).unwrap().root_value();
        let tree = tree_value_oracle(&p, 2000).unwrap();
        worst = worst.max((pde - tree).abs());
        parts.push(format!("{name} {:.1e}", (pde - tree).abs()));
    }
    let abs = solve_g_heat(&vi(1.0, 2.0), &named_terminal("abs").unwrap(), Resolution::default()).unwrap().root_value();
    let abs_err = (abs - 1.59577).abs();
    outcome(
        worst <= 1e-2 && abs_err <= 2e-3,
        format!("|pde - tree| {} (tol 1e-2); g-heat |x| = {abs:.6}, err {abs_err:.1e} (tol 2e-3)", parts.join(", ")),
    )
}

fn criterion_7() -> Outcome {
    let gauss = named_terminal("gauss").unwrap();
    let tanh = named_terminal("tanh").unwrap();
    let cdf = named_terminal("normal-cdf").unwrap();
    let heat = |f: &TestFunction| solve_g_heat(&vi(1.0, 2.0), f, Resolution::default()).unwrap().root_value();
    let gexp = |f: &TestFunction| {
        solve_g_expectation(&mi(-0.5, 0.5), f, Side::Sup, Resolution::default()).unwrap().root_value()
    };
    let mut failures = Vec::new();
    for (label, value) in [("g-heat", &heat as &dyn Fn(&TestFunction) -> f64), ("g-expectation", &gexp)] {
        for k in [-1.5, 0.0, 2.0] {
            if (value(&TestFunction::constant(k)) - k).abs() > 1e-9 {
                failures.push(format!("{label} constant {k}"));
            }
        }
        if value(&cdf) > value(&cdf.plus(&gauss)) + 1e-9 {
            failures.push(format!("{label} monotone"));
        }
        if value(&tanh.plus(&gauss)) > value(&tanh) + value(&gauss) + 1e-6 {
            failures.push(format!("{label} subadditive"));
        }
        let base = value(&tanh);
        for lambda in [0.0, 0.5, 2.0] {
            if (value(&tanh.scaled(lambda)) - lambda * base).abs() > 1e-6 * (1.0 + lambda) {
                failures.push(format!("{label} homogeneous {lambda}"));
            }
        }
    }
    for phi in [&gauss, &tanh, &cdf] {
        let sup = solve_g_expectation(&mi(-0.5, 0.5), phi, Side::Sup, Resolution::default()).unwrap();
        let inf = solve_g_expectation(&mi(-0.5, 0.5), phi, Side::Inf, Resolution::default()).unwrap();
        if sup.root_value() < inf.root_value() - 1e-9 {
            failures.push(format!("sup < inf for {}", phi.name));
        }
        if !sup.satisfies_maximum_principle(1e-12) || !inf.satisfies_maximum_principle(1e-12) {
            failures.push(format!("maximum principle for {}", phi.name));
        }
    }
    let detail = if failures.is_empty() {
        "constants 1e-9, monotone 1e-9, subadditive 1e-6, homogeneous 1e-6(1+l), sup>=inf, maximum principle: all hold".into()
    } else {
        format!("violations: {}", failures.join("; "))
    };
    outcome(failures.is_empty(), detail)
}

fn criterion_8() -> Outcome {
    const SCHEDULE: [usize; 5] = [125, 250, 500, 1000, 2000];
    let mean = RectangularModel::new(
        ModelKind::MeanUncertain { interval: mi(-0.5, 0.5), sigma: 1.0 },
        Innovation::Rademacher,
        1,
    )
    .unwrap();
    let var = RectangularModel::new(ModelKind::VarianceUncertain { interval: vi(1.0, 2.0) }, Innovation::Rademacher, 1)
        .unwrap();
    let gauss = named_terminal("gauss").unwrap();
    let s_bar = s_shaped_terminal("tanh", 0.0, 0.5, Envelope::Phibar).unwrap();
    let s_phi = s_shaped_terminal("tanh", 0.0, 0.5, Envelope::Phi).unwrap();
    let cases: [(&str, &RectangularModel, &TestFunction, Side, DensityParams); 4] = [
        ("mean sup vs f^(-0.5,0,0)", &mean, &gauss, Side::Sup, DensityParams::new(-0.5, 0.0, 0.0)),
        ("mean inf vs f^(0.5,0,0)", &mean, &gauss, Side::Inf, DensityParams::new(0.5, 0.0, 0.0)),
        ("variance sup vs q^(1,2,0)", &var, &s_bar, Side::Sup, DensityParams::new(1.0, 2.0, 0.0)),
        ("variance inf vs q^(2,1,0)", &var, &s_phi, Side::Inf, DensityParams::new(2.0, 1.0, 0.0)),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (label, model, phi, side, expected) in cases {
        let table = convergence_experiment(model, phi, &SCHEDULE, &DpOptions::new(side)).unwrap();
        let source_ok = match table.source {
            LimitSource::ChenEpstein(p) | LimitSource::Cez(p) => p == expected,
            LimitSource::Pde => false,
        };
        let (g125, g2000) = (table.gap(125).unwrap(), table.gap(2000).unwrap());
        ok &= source_ok && g2000 <= 0.02 && g2000 < g125;
        parts.push(format!("{label}: gap(125) {g125:.2e}, gap(2000) {g2000:.2e}{}", if source_ok { "" } else { " [wrong limit]" }));
    }
    outcome(ok, format!("{} (need gap(2000) <= 0.02 and < gap(125))", parts.join("; ")))
}

fn criterion_9() -> Outcome {
    let model = RectangularModel::new(ModelKind::VarianceUncertain { interval: vi(1.0, 2.0) }, Innovation::Rademacher, 1)
        .unwrap();
    let terminals = [
        named_terminal("gauss").unwrap(),
        named_terminal("tanh").unwrap(),
        s_shaped_terminal("tanh", 0.0, 0.5, Envelope::Phibar).unwrap(),
    ];
    let mut worst: f64 = 0.0;
    for n in 1..=12 {
        let m = model.with_n(n);
        for phi in &terminals {
            for side in [Side::Sup, Side::Inf] {
                let dp = sup_expectation_dp(&m, phi, &DpOptions::new(side)).unwrap().value;
                let brute = brute_force_value(&m, phi, side, false).unwrap();
                worst = worst.max((dp - brute).abs());
            }
        }
    }
    outcome(worst <= 1e-12, format!("n = 1..12, 3 terminals, both sides: max |dp - brute force| = {worst:.2e} (tol 1e-12)"))
}

/// Configs exercised by the determinism criterion.
const CONFIGS: [&str; 8] = [
    r#"{"command":"density","params":{"family":"chen-epstein","alpha":0,"beta":0,"c":0,"grid":"-4:4:801"}}"#,
    r#"{"command":"figures","params":{"set":"paper"}}"#,
    r#"{"command":"solve","params":{"generator":"g-heat","sigma_low":1,"sigma_high":2,"terminal":"abs","tree_steps":500}}"#,
    r#"{"command":"converge","params":{"kind":"mean","mu_low":-0.5,"mu_high":0.5,"sigma":1,"terminal":"gauss","schedule":[125,250]}}"#,
    r#"{"command":"check","params":{"target":"classical","law":"bernoulli","p":0.3}}"#,
    r#"{"command":"check","seed":11,"params":{"target":"martingale","model":"var-feedback","init":1,"pos":0.5,"neg":1.5}}"#,
    r#"{"command":"simulate","seed":5,"stream":3,"params":{"target":"hall","eta_values":[1,2],"eta_probs":[0.5,0.5],"k_n":1000,"reps":20000}}"#,
    r#"{"command":"simulate","seed":9,"params":{"target":"policy","kind":"variance","sigma_low":1,"sigma_high":2,"terminal":"s-shaped","n":50,"reps":20000}}"#,
];

fn run_into(text: &str, dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut cfg = RunConfig::from_json(text).unwrap();
    cfg.out = Some(dir.to_path_buf());
    cli::run(&cfg)
        .unwrap()
        .into_iter()
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect()
}

fn criterion_10() -> Outcome {
    let mut files = 0;
    let mut mismatched = Vec::new();
    for text in CONFIGS {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let first = run_into(text, a.path());
        let second = run_into(text, b.path());
        files += first.len();
        if first != second {
            mismatched.push(text.to_string());
        }
    }
    outcome(
        mismatched.is_empty(),
        format!("{} configs, {files} CSV files compared byte for byte; mismatches: {}", CONFIGS.len(), mismatched.len()),
    )
}

/// (name, check, runtime budget in seconds)
type Criterion = (&'static str, fn() -> Outcome, u64);

fn main() {
    let criteria: [Criterion; 10] = [
        ("density normalization", criterion_1, 30),
        ("degeneracy", criterion_2, 60),
        ("spike and binormal shapes", criterion_3, 60),
        ("classical chain", criterion_4, 10),
        ("martingale chain", criterion_5, 60),
        ("solver cross-validation", criterion_6, 180),
        ("sublinearity axioms", criterion_7, 180),
        ("nonlinear CLT convergence", criterion_8, 600),
        ("brute-force equivalence", criterion_9, 60),
        ("determinism", criterion_10, 300),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let in_budget = elapsed <= Duration::from_secs(*budget);
        let pass = result.pass && in_budget;
        if !pass {
            failed += 1;
        }
        println!(
            "[{}] {:>2}. {name}: {} [{:.1} s, budget {budget} s{}]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            result.detail,
            elapsed.as_secs_f64(),
            if in_budget { "" } else { ", exceeded" }
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
