use nlclt::classical::{lindeberg_statistic, lyapunov_statistic, IidLaw, IidModel};
use nlclt::densities::{
    cez_pdf, chen_epstein_pdf, select_mean_limit_params, DensityParams, MeanInterval, Monotonicity, Side,
    VarianceInterval,
};
use nlclt::martingale::{hall_mixture_sampler, MdsKind, MixtureLimit};
use nlclt::measure_set::{sup_expectation_dp, DpOptions, Innovation, ModelKind, RectangularModel};
use nlclt::numerics::{mean_and_se, quad_integrate, rademacher_stream, std_normal_cdf, Grid1D, SeedSpec};
use nlclt::report::format_number;
use nlclt::sublinear::{compute_g, named_terminal, TestFunction};
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn normal_cdf_monotone_and_symmetric(x in -10.0f64..10.0, h in 0.0f64..5.0) {
        prop_assert!(std_normal_cdf(x) <= std_normal_cdf(x + h));
        prop_assert!((std_normal_cdf(x) + std_normal_cdf(-x) - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn quadrature_is_additive(a in -5.0f64..0.0, w1 in 0.1f64..4.0, w2 in 0.1f64..4.0) {
        let f = |x: f64| (-(x - 0.3) * (x - 0.3)).exp() * (1.0 + 0.5 * x.sin());
        let (b, c) = (a + w1, a + w1 + w2);
        let left = quad_integrate(f, a, b, 1e-12).unwrap();
        let right = quad_integrate(f, b, c, 1e-12).unwrap();
        let whole = quad_integrate(f, a, c, 1e-12).unwrap();
        let slack = left.err_estimate + right.err_estimate + whole.err_estimate + 1e-14;
        prop_assert!((left.value + right.value - whole.value).abs() <= slack);
    }

    #[test]
    fn streams_are_reproducible(seed in any::<u64>(), stream in any::<u32>(), n in 1usize..5000) {
        let spec = SeedSpec::new(seed, stream);
        prop_assert_eq!(rademacher_stream(spec, n), rademacher_stream(spec, n));
    }

    #[test]
    fn number_format_round_trips(x in prop::num::f64::NORMAL) {
        let back: f64 = format_number(x).parse().unwrap();
        prop_assert!((back - x).abs() <= 1e-14 * x.abs());
    }

    #[test]
    fn grid_spec_round_trips(lo in -50.0f64..0.0, w in 0.5f64..50.0, points in 2usize..10_000) {
        let spec = format!("{}:{}:{}", format_number(lo), format_number(lo + w), points);
        let g = Grid1D::parse(&spec).unwrap();
        prop_assert_eq!(g.len(), points);
        prop_assert!((g.lo() - lo).abs() <= 1e-13 * lo.abs().max(1.0));
    }

    #[test]
    fn chen_epstein_non_negative(alpha in -2.0f64..2.0, beta in -1.0f64..1.0, c in -1.0f64..1.0) {
        let p = DensityParams::new(alpha, beta, c);
        for i in 0..=400 {
            let y = -10.0 + 0.05 * i as f64;
            prop_assert!(chen_epstein_pdf(&p, y) >= 0.0, "y = {}", y);
        }
    }

    #[test]
    fn cez_non_negative(alpha in 0.2f64..3.0, beta in 0.2f64..3.0, c in -2.0f64..2.0) {
        let p = DensityParams::new(alpha, beta, c);
        let (lo, hi) = (c - 8.0 * beta, c + 8.0 * alpha);
        for i in 0..=1000 {
            let y = lo + (hi - lo) * i as f64 / 1000.0;
            prop_assert!(cez_pdf(&p, y).unwrap() >= 0.0, "y = {}", y);
        }
    }

    #[test]
    fn mean_limit_sides_differ_by_sign(lo in -2.0f64..2.0, w in 0.0f64..2.0, c in -1.0f64..1.0, inc in any::<bool>()) {
        let m = MeanInterval::new(lo, lo + w).unwrap();
        let mono = if inc { Monotonicity::Increasing } else { Monotonicity::Decreasing };
        let sup = select_mean_limit_params(&m, c, mono, Side::Sup);
        let inf = select_mean_limit_params(&m, c, mono, Side::Inf);
        prop_assert_eq!(sup.alpha, -inf.alpha + 0.0);
        prop_assert_eq!((sup.beta, sup.c), (inf.beta, inf.c));
    }

    #[test]
    fn lyapunov_halves_when_n_quadruples(p in 0.05f64..0.95, n in 1usize..100_000) {
        let model = IidModel::new(IidLaw::Bernoulli { p }, 1.0).unwrap();
        let a = lyapunov_statistic(&model, n).unwrap();
        let b = lyapunov_statistic(&model, 4 * n).unwrap();
        prop_assert!((b - 0.5 * a).abs() <= 1e-14 * a);
    }

    #[test]
    fn lindeberg_non_increasing(p in 0.05f64..0.95, eps in 0.001f64..1.0, k in 1.0f64..4.0, n in 1usize..5000, m in 1usize..5000) {
        let model = IidModel::new(IidLaw::Bernoulli { p }, 1.0).unwrap();
        let base = lindeberg_statistic(&model, n, eps).unwrap();
        prop_assert!(lindeberg_statistic(&model, n, eps * k).unwrap() <= base);
        prop_assert!(lindeberg_statistic(&model, n + m, eps).unwrap() <= base);
    }

    #[test]
    fn g_is_positively_homogeneous_and_convex(lo in 0.1f64..2.0, w in 0.0f64..2.0, a in -5.0f64..5.0, b in -5.0f64..5.0, l in 0.0f64..3.0) {
        let v = VarianceInterval::new(lo, lo + w).unwrap();
        prop_assert!((compute_g(l * a, &v) - l * compute_g(a, &v)).abs() <= 1e-12 * (1.0 + l * a.abs()));
        let mid = compute_g(0.5 * (a + b), &v);
        prop_assert!(mid <= 0.5 * (compute_g(a, &v) + compute_g(b, &v)) + 1e-12);
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn martingale_conditional_mean_zero(init in 0.2f64..3.0, pos in 0.2f64..3.0, neg in 0.2f64..3.0, seed in any::<u64>()) {
        use rand::SeedableRng;
        let kind = MdsKind::VarFeedback { init, pos, neg };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut state = kind.initial_state(&mut rng);
        for _ in 0..50 {
            let support = kind.conditional_support(state);
            let mean: f64 = support.iter().map(|(x, p)| x * p).sum();
            prop_assert_eq!(mean, 0.0);
            let x = if rand::Rng::random::<bool>(&mut rng) { support[0].0 } else { support[1].0 };
            state = kind.advance(state, x);
        }
    }

    #[test]
    fn mixture_second_moment(eta1 in 0.2f64..3.0, eta2 in 0.2f64..3.0, p in 0.1f64..0.9, seed in any::<u64>()) {
        let limit = MixtureLimit::from_eta(&[eta1, eta2], &[p, 1.0 - p]).unwrap();
        let draws = hall_mixture_sampler(&limit, 20_000, SeedSpec::new(seed, 0));
        let squares: Vec<f64> = draws.iter().map(|x| x * x).collect();
        let (mean, se) = mean_and_se(&squares);
        prop_assert!((mean - limit.second_moment()).abs() <= 4.0 * se, "{} vs {}", mean, limit.second_moment());
    }
}

fn dp(model: &RectangularModel, phi: &TestFunction, side: Side) -> f64 {
    sup_expectation_dp(model, phi, &DpOptions::new(side)).unwrap().value
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn dp_sublinear_properties(lo in 0.5f64..1.5, w in 0.0f64..1.5, n in 1usize..40, k in -2.0f64..2.0, lambda in 0.0f64..3.0) {
        let model = RectangularModel::new(
            ModelKind::VarianceUncertain { interval: VarianceInterval::new(lo, lo + w).unwrap() },
            Innovation::Rademacher,
            n,
        ).unwrap();
        let gauss = named_terminal("gauss").unwrap();
        let tanh = named_terminal("tanh").unwrap();
        prop_assert!((dp(&model, &TestFunction::constant(k), Side::Sup) - k).abs() <= 1e-9);
        prop_assert!(dp(&model, &tanh, Side::Sup) <= dp(&model, &tanh.plus(&gauss), Side::Sup) + 1e-9);
        prop_assert!(dp(&model, &tanh.plus(&gauss), Side::Sup) <= dp(&model, &tanh, Side::Sup) + dp(&model, &gauss, Side::Sup) + 1e-9);
        let scaled = dp(&model, &tanh.scaled(lambda), Side::Sup);
        prop_assert!((scaled - lambda * dp(&model, &tanh, Side::Sup)).abs() <= 1e-9 * (1.0 + lambda));
        prop_assert!(dp(&model, &gauss, Side::Sup) >= dp(&model, &gauss, Side::Inf) - 1e-12);
    }

    #[test]
    fn dp_monotone_in_measure_set(mid in -0.5f64..0.5, w1 in 0.0f64..0.5, w2 in 0.0f64..0.5, n in 1usize..60) {
        let model = |w: f64| RectangularModel::new(
            ModelKind::MeanUncertain { interval: MeanInterval::new(mid - w, mid + w).unwrap(), sigma: 1.0 },
            Innovation::Rademacher,
            n,
        ).unwrap();
        let (inner, outer) = (model(w1), model(w1 + w2));
        let phi = named_terminal("normal-cdf").unwrap();
        // The two models may sit on different lattices, so allow for their interpolation errors.
        for side in [Side::Sup, Side::Inf] {
            let a = sup_expectation_dp(&inner, &phi, &DpOptions::new(side)).unwrap();
            let b = sup_expectation_dp(&outer, &phi, &DpOptions::new(side)).unwrap();
            let slack = 3.0 * (a.grid_error + b.grid_error) + 1e-12;
            match side {
                Side::Sup => prop_assert!(b.value >= a.value - slack),
                Side::Inf => prop_assert!(b.value <= a.value + slack),
            }
        }
    }
}
