use proptest::prelude::*;
use raceway_core::{
    integrate_forward, objective, simulate, EnvironmentConfig, FlowState, FourierShape,
    HanParameters, LayerSetup,
};

fn flat_oracle(nz: usize) -> f64 {
    let (kr, kd, tau, sigma, k, r) = (6.8e-3, 2.99e-4, 0.25, 0.047, 8.7e-6, 1.389e-7);
    let eps = 10f64.ln() / 0.4;
    (0..nz)
        .map(|i| {
            let depth = 0.4 * (i as f64 + 0.5) / nz as f64;
            let si = sigma * 2050.0 * (-eps * depth).exp();
            let alpha = kd * tau * si * si / (tau * si + 1.0) + kr;
            let beta = alpha - kr;
            let gamma = k * si / (tau * si + 1.0);
            -gamma * beta / alpha + gamma - r
        })
        .sum::<f64>()
        / nz as f64
}

fn optimum_like() -> FourierShape {
    FourierShape::new(vec![0.1043, 0.0503, 0.0333, 0.0250, 0.0201])
}

fn shape_strategy() -> impl Strategy<Value = FourierShape> {
    (1usize..=5).prop_flat_map(|n| {
        let bound = 0.4 / (2.0 * n as f64);
        proptest::collection::vec(-bound..=bound, n).prop_map(FourierShape::new)
    })
}

#[test]
fn flat_matches_closed_form() {
    let env = EnvironmentConfig::default();
    let han = HanParameters::default();
    for nz in [1, 10, 40] {
        let mu = objective(
            &FourierShape::flat(0),
            &env,
            &han,
            &LayerSetup::uniform(nz),
            0.1,
        )
        .unwrap();
        let oracle = flat_oracle(nz);
        assert!(
            ((mu - oracle) / oracle).abs() < 1e-6,
            "nz = {nz}: {mu} vs {oracle}"
        );
    }
}

#[test]
fn heun_is_second_order() {
    let env = EnvironmentConfig::default();
    let han = HanParameters::default();
    let setup = LayerSetup::uniform(5);
    let shape = optimum_like();
    let reference = objective(&shape, &env, &han, &setup, 0.1 / 16.0).unwrap();
    let errors: Vec<f64> = [0.4, 0.2, 0.1]
        .iter()
        .map(|&dt| (objective(&shape, &env, &han, &setup, dt).unwrap() - reference).abs())
        .collect();
    for w in errors.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 1.8, "observed order {order} from {errors:?}");
    }
}

#[test]
fn simulation_is_deterministic() {
    let env = EnvironmentConfig::default();
    let han = HanParameters::default();
    let setup = LayerSetup::uniform(7);
    let a = simulate(&optimum_like(), &env, &han, &setup, 0.1).unwrap();
    let b = simulate(&optimum_like(), &env, &han, &setup, 0.1).unwrap();
    assert_eq!(a, b);
}

#[test]
fn one_layer_setup_is_a_single_trace() {
    let env = EnvironmentConfig::default();
    let han = HanParameters::default();
    let shape = optimum_like();
    let setup = LayerSetup::new(vec![0.3]).unwrap();
    let traces = simulate(&shape, &env, &han, &setup, 0.1).unwrap();
    let inlet = FlowState::new(&shape, &env, 0.0).unwrap();
    let single = integrate_forward(&shape, &env, &han, inlet.eta - 0.3 * inlet.h, 0.1).unwrap();
    assert_eq!(traces.len(), 1);
    assert_eq!(traces[0], single);
    let mu = objective(&shape, &env, &han, &setup, 0.1).unwrap();
    assert_eq!(mu, single.mean_growth());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn relative_depth_drift_is_second_order(shape in shape_strategy()) {
        let env = EnvironmentConfig::default();
        let han = HanParameters::default();
        let setup = LayerSetup::uniform(4);
        let drift = |dt: f64| -> f64 {
            let traces = simulate(&shape, &env, &han, &setup, dt).unwrap();
            let mut worst: f64 = 0.0;
            for (trace, &s0) in traces.iter().zip(setup.relative_depths()) {
                for sample in &trace.samples {
                    let f = FlowState::new(&shape, &env, sample.x).unwrap();
                    worst = worst.max(((f.eta - sample.z) / f.h - s0).abs());
                }
            }
            worst
        };
        let coarse = drift(0.1);
        let fine = drift(0.05);
        prop_assert!(coarse < 1e-3);
        prop_assert!(fine < 0.3 * coarse + 1e-10, "{coarse} -> {fine}");
    }

    #[test]
    fn lap_ends_at_outlet_after_fixed_time(shape in shape_strategy()) {
        let env = EnvironmentConfig::default();
        let han = HanParameters::default();
        let traces = simulate(&shape, &env, &han, &LayerSetup::uniform(4), 0.1).unwrap();
        for trace in &traces {
            prop_assert!(((trace.final_time() - 100.0) / 100.0).abs() < 1e-3);
            prop_assert_eq!(trace.samples.last().unwrap().x, env.length);
            prop_assert!(trace.samples.iter().all(|s| (0.0..=1.0).contains(&s.c)));
        }
    }

    #[test]
    fn growth_bounded_by_surface_rate(shape in shape_strategy()) {
        let env = EnvironmentConfig::default();
        let han = HanParameters::default();
        let mu = objective(&shape, &env, &han, &LayerSetup::uniform(3), 0.2).unwrap();
        let surface = han.rates(env.surface_light).unwrap();
        prop_assert!(mu.is_finite());
        prop_assert!(mu <= surface.zeta);
    }
}
