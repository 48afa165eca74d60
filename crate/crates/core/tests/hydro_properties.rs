use proptest::prelude::*;
use raceway_core::{EnvironmentConfig, FlowState, FourierShape, HanParameters, Light};

fn env() -> EnvironmentConfig {
    EnvironmentConfig::default()
}

fn shape_strategy() -> impl Strategy<Value = FourierShape> {
    (1usize..=6).prop_flat_map(|n| {
        let bound = 0.4 / (2.0 * n as f64);
        proptest::collection::vec(-bound..=bound, n).prop_map(FourierShape::new)
    })
}

fn height_oracle(coeffs: &[f64], x: f64) -> f64 {
    0.4 + coeffs
        .iter()
        .enumerate()
        .map(|(i, a)| a * (2.0 * (i + 1) as f64 * std::f64::consts::PI * x / 10.0).sin())
        .sum::<f64>()
}

fn rel(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / b.abs().max(floor)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn discharge_and_bernoulli_hold(shape in shape_strategy(), x in 0.0..=10.0f64) {
        let env = env();
        let f = FlowState::new(&shape, &env, x).unwrap();
        prop_assert!((f.h * f.u - env.q0).abs() < 1e-12);
        let m0 = env.q0 * env.q0 / (2.0 * 0.16) + 9.81 * (0.4 - 0.4);
        prop_assert!((f.u * f.u / 2.0 + 9.81 * (f.h + f.zb) - m0).abs() < 1e-10);
        prop_assert!((f.eta - f.zb - f.h).abs() < 1e-12);
        prop_assert!((f.h - height_oracle(shape.coeffs(), x)).abs() < 1e-12);
    }

    #[test]
    fn volume_is_fixed(shape in shape_strategy()) {
        let env = env();
        let n = 2000;
        let dx = env.length / n as f64;
        let interior: f64 = (1..n).map(|i| shape.height(&env, i as f64 * dx).h).sum();
        let ends = 0.5 * (shape.height(&env, 0.0).h + shape.height(&env, env.length).h);
        let volume = (interior + ends) * dx;
        prop_assert!(rel(volume, env.a0 * env.length, 1.0) < 1e-8);
    }

    #[test]
    fn vertical_velocity_boundary_conditions(shape in shape_strategy(), x in 0.0..=10.0f64) {
        let env = env();
        let f = FlowState::new(&shape, &env, x).unwrap();
        let bottom = f.vertical_velocity(f.zb).w;
        let surface = f.vertical_velocity(f.eta).w;
        prop_assert!((bottom - f.u * f.dzb()).abs() < 1e-12);
        prop_assert!((surface - f.u * f.deta).abs() < 1e-12);
        let mid = 0.5 * (f.zb + f.eta);
        prop_assert!((f.vertical_velocity(mid).dw_dz + f.du).abs() < 1e-14);
    }

    #[test]
    fn vertical_velocity_x_derivative(shape in shape_strategy(), x in 0.5..=9.5f64, s in 0.05..0.95f64) {
        let env = env();
        let f = FlowState::new(&shape, &env, x).unwrap();
        let z = f.eta - s * f.h;
        let step = 1e-5;
        let up = FlowState::new(&shape, &env, x + step).unwrap().vertical_velocity(z).w;
        let down = FlowState::new(&shape, &env, x - step).unwrap().vertical_velocity(z).w;
        let fd = (up - down) / (2.0 * step);
        prop_assert!((f.vertical_velocity(z).dw_dx - fd).abs() < 1e-7 * fd.abs().max(1e-4));
    }

    #[test]
    fn shape_sensitivities_match_differences(
        shape in shape_strategy(),
        x in 0.0..=10.0f64,
        s in 0.05..0.95f64,
        pick in 0usize..6,
    ) {
        let env = env();
        let n = pick % shape.order();
        let base = FlowState::new(&shape, &env, x).unwrap();
        let z = base.eta - s * base.h;
        let sens = base.sensitivity(n + 1, z).unwrap();
        let step = 1e-6;
        let mut plus = shape.clone();
        plus.coeffs_mut()[n] += step;
        let mut minus = shape.clone();
        minus.coeffs_mut()[n] -= step;
        let fp = FlowState::new(&plus, &env, x).unwrap();
        let fm = FlowState::new(&minus, &env, x).unwrap();
        let d = |a: f64, b: f64| (a - b) / (2.0 * step);
        prop_assert!(rel(sens.dh, d(fp.h, fm.h), 1e-3) < 1e-5);
        prop_assert!(rel(sens.ddh, d(fp.dh, fm.dh), 1e-2) < 1e-5);
        prop_assert!(rel(sens.du, d(fp.u, fm.u), 1e-3) < 1e-5);
        prop_assert!(rel(sens.ddu, d(fp.du, fm.du), 1e-3) < 1e-5);
        prop_assert!(rel(sens.deta, d(fp.eta, fm.eta), 1e-4) < 1e-5);
        let dw = d(fp.vertical_velocity(z).w, fm.vertical_velocity(z).w);
        prop_assert!(rel(sens.dw, dw, 1e-4) < 1e-5);
    }

    #[test]
    fn light_decreases_with_depth(shape in shape_strategy(), x in 0.0..=10.0f64, s1 in 0.0..1.0f64, s2 in 0.0..1.0f64) {
        let env = env();
        let f = FlowState::new(&shape, &env, x).unwrap();
        let (shallow, deep) = if s1 < s2 { (s1, s2) } else { (s2, s1) };
        let a = Light::at(&env, &f, f.eta - shallow * f.h).unwrap().intensity;
        let b = Light::at(&env, &f, f.eta - deep * f.h).unwrap().intensity;
        prop_assert!(b <= a && a <= env.surface_light);
        prop_assert!(b > 0.0);
    }

    #[test]
    fn han_rates_are_monotone(i1 in 0.0..3000.0f64, i2 in 0.0..3000.0f64) {
        let han = HanParameters::default();
        let (lo, hi) = if i1 < i2 { (i1, i2) } else { (i2, i1) };
        let a = han.rates(lo).unwrap();
        let b = han.rates(hi).unwrap();
        prop_assert!(a.alpha <= b.alpha && a.gamma <= b.gamma);
        prop_assert!(a.dalpha >= 0.0 && a.dgamma >= 0.0);
        let css = b.steady_state();
        prop_assert!((0.0..1.0).contains(&css));
        prop_assert!(b.inhibition_rate(css).abs() < 1e-15);
    }
}

#[test]
fn flat_light_reaches_ten_percent_at_bottom() {
    let env = env();
    let f = FlowState::new(&FourierShape::flat(3), &env, 3.0).unwrap();
    let bottom = Light::at(&env, &f, f.zb).unwrap().intensity;
    assert!((bottom - 205.0).abs() < 1e-9);
}
