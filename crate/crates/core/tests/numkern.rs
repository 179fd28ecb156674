use darboux_core::numkern::{exp_ikx, gaussian_packet, seed_jet, Jet, NumError, RealSeed};
use num_complex::Complex64;
use proptest::prelude::*;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

#[test]
fn cosh_taylor_at_origin() {
    let j = seed_jet(RealSeed::Cosh, 1.0, 0.0, 0.0, 2).unwrap();
    assert!(close(j.taylor(0), 1.0, 1e-15));
    assert_eq!(j.taylor(1), 0.0);
    assert!(close(j.taylor(2), 0.5, 1e-15));
}

#[test]
fn cosh_far_out_keeps_log_magnitude() {
    let j = seed_jet(RealSeed::Cosh, 1.0, 0.0, 800.0, 4).unwrap();
    let sv = j.scaled_value();
    assert!((sv.log_mag - (800.0 - std::f64::consts::LN_2)).abs() < 1e-12);
    assert!(sv.log_mag.is_finite());
    assert_eq!(sv.phase, 1.0);
}

#[test]
fn tanh_value_matches_libm() {
    let j = seed_jet(RealSeed::Tanh, 2.0, 0.5, 0.0, 5).unwrap();
    assert!((j.value() - 1f64.tanh()).abs() < 1e-16);
}

#[test]
fn coth_refuses_its_pole() {
    let e = seed_jet(RealSeed::Coth, 1.0, 0.3, -0.3 + 1e-5, 3).unwrap_err();
    assert!(matches!(e, NumError::PoleProximity { .. }));
}

#[test]
fn add_negation_is_zero() {
    let f = seed_jet(RealSeed::Sinh, 1.3, 0.2, 0.7, 6).unwrap();
    let z = f.add(&f.neg()).unwrap();
    assert!(z.is_zero());
    assert_eq!(z.scaled_value().log_mag, f64::NEG_INFINITY);
}

#[test]
fn cosh_times_reciprocal_is_one() {
    for &x in &[-30.0, -1.0, 0.0, 2.5, 300.0] {
        let c = seed_jet(RealSeed::Cosh, 1.7, -0.4, x, 8).unwrap();
        let one = c.mul(&c.recip().unwrap()).unwrap();
        assert!((one.taylor(0) - 1.0).abs() < 1e-14);
        for m in 1..=8 {
            assert!(one.taylor(m).abs() < 1e-14, "m={m} {}", one.taylor(m));
        }
    }
}

#[test]
fn scaling_doubles_every_derivative() {
    let f = seed_jet(RealSeed::Cosh, 0.8, 0.1, 1.2, 5).unwrap();
    let g = f.scale_by(2.0);
    for m in 0..=5 {
        assert!(close(g.derivative_value(m), 2.0 * f.derivative_value(m), 1e-15));
    }
}

#[test]
fn mismatched_points_are_rejected() {
    let a = seed_jet(RealSeed::Cosh, 1.0, 0.0, 0.0, 3).unwrap();
    let b = seed_jet(RealSeed::Cosh, 1.0, 0.0, 0.1, 3).unwrap();
    assert!(matches!(a.add(&b), Err(NumError::PointMismatch { .. })));
    assert!(matches!(a.mul(&b), Err(NumError::PointMismatch { .. })));
}

#[test]
fn derivative_of_cosh_is_kappa_sinh() {
    let (k, t, x) = (1.4, 0.3, -0.9);
    let d = seed_jet(RealSeed::Cosh, k, t, x, 6).unwrap().derivative().unwrap();
    let s = seed_jet(RealSeed::Sinh, k, t, x, 5).unwrap();
    for m in 0..=5 {
        assert!(close(d.taylor(m), k * s.taylor(m), 1e-14));
    }
}

#[test]
fn derivative_of_order_zero_is_exhausted() {
    let j = Jet::constant(0.0, 1.0f64, 0);
    assert!(matches!(j.derivative(), Err(NumError::OrderExhausted { .. })));
}

#[test]
fn plane_wave_second_derivative() {
    let (k, x) = (2.3, 0.4);
    let f = exp_ikx(k, x, 8);
    let d2 = f.derivative().unwrap().derivative().unwrap();
    for m in 0..=6 {
        let want = f.taylor(m) * (-k * k);
        assert!((d2.taylor(m) - want).norm() < 1e-13 * want.norm().max(1.0));
    }
}

#[test]
fn derivative_matches_finite_difference() {
    let (k, t, x, h) = (1.1, -0.2, 0.6, 1e-5);
    let f = |x: f64| seed_jet(RealSeed::Tanh, k, t, x, 3).unwrap();
    let fd = (f(x + h).value() - f(x - h).value()) / (2.0 * h);
    assert!((f(x).derivative_value(1) - fd).abs() < 1e-8);
}

#[test]
fn log_derivative_examples() {
    let (k, t, x) = (1.6, 0.25, -0.3);
    let ld = seed_jet(RealSeed::Cosh, k, t, x, 7).unwrap().log_derivative().unwrap();
    let th = seed_jet(RealSeed::Tanh, k, t, x, 6).unwrap();
    for m in 0..=6 {
        assert!((ld.taylor(m) - k * th.taylor(m)).abs() < 1e-13, "m={m}");
    }
    let ld = exp_ikx(0.9, 0.3, 5).log_derivative().unwrap();
    assert!((ld.taylor(0) - Complex64::new(0.0, 0.9)).norm() < 1e-15);
    for m in 1..=4 {
        assert!(ld.taylor(m).norm() < 1e-15);
    }
    let far = seed_jet(RealSeed::Cosh, 1.0, 0.0, 600.0, 3).unwrap().log_derivative().unwrap();
    assert!((far.value() - 1.0).abs() < 1e-12);
}

#[test]
fn gaussian_packet_matches_direct_evaluation() {
    let (c, w, k) = (0.4, 0.8, 2.0);
    for &x in &[-1.0, 0.3, 2.2] {
        let j = gaussian_packet(c, w, k, x, 4);
        let want = Complex64::new(-(x - c) * (x - c) / (2.0 * w * w), k * x).exp();
        assert!((j.value() - want).norm() < 1e-15);
        let h = 1e-5;
        let fd = (gaussian_packet(c, w, k, x + h, 0).value() - gaussian_packet(c, w, k, x - h, 0).value()) / (2.0 * h);
        assert!((j.derivative_value(1) - fd).norm() < 1e-8);
    }
}

fn seed_strategy() -> impl Strategy<Value = RealSeed> {
    prop_oneof![Just(RealSeed::Cosh), Just(RealSeed::Sinh), Just(RealSeed::Tanh)]
}

proptest! {
    #[test]
    fn seeds_reconstruct_libm_values(kind in seed_strategy(), k in 0.2f64..3.0, t in -2.0f64..2.0, x in -1000.0f64..1000.0) {
        let j = seed_jet(kind, k, t, x, 4).unwrap();
        let y = k * (x + t);
        let want = match kind {
            RealSeed::Cosh => y.cosh(),
            RealSeed::Sinh => y.sinh(),
            _ => y.tanh(),
        };
        prop_assume!(want.is_finite() && want.abs() > 1e-300);
        let ratio = j.value() / want;
        prop_assert!((ratio - 1.0).abs() <= 1e-12, "ratio {}", ratio);
    }

    #[test]
    fn leibniz_rule(k1 in 0.2f64..3.0, k2 in 0.2f64..3.0, t in -1.0f64..1.0, x in -20.0f64..20.0) {
        let a = seed_jet(RealSeed::Cosh, k1, t, x, 7).unwrap();
        let b = seed_jet(RealSeed::Tanh, k2, -t, x, 7).unwrap();
        let lhs = a.mul(&b).unwrap().derivative().unwrap();
        let rhs = a.derivative().unwrap().mul(&b.truncate(6)).unwrap()
            .add(&a.truncate(6).mul(&b.derivative().unwrap()).unwrap()).unwrap();
        let scale = lhs.log_max_coeff().exp();
        for m in 0..=6 {
            prop_assert!((lhs.taylor(m) - rhs.taylor(m)).abs() <= 1e-13 * scale);
        }
    }

    #[test]
    fn log_scale_is_only_bookkeeping(s in -50.0f64..50.0, x in -5.0f64..5.0) {
        let f = seed_jet(RealSeed::Sinh, 1.2, 0.3, x, 5).unwrap();
        let coeffs: Vec<f64> = f.coeffs().iter().map(|c| c * s.exp()).collect();
        let g = Jet::from_parts(x, f.log_scale() - s, coeffs);
        for m in 0..=5 {
            prop_assert!((g.taylor(m) - f.taylor(m)).abs() <= 1e-13 * f.log_max_coeff().exp());
        }
    }

    #[test]
    fn coefficients_stay_in_band(k in 0.2f64..3.0, x in -300.0f64..300.0) {
        let a = seed_jet(RealSeed::Cosh, k, 0.0, x, 6).unwrap();
        let p = a.mul(&a).unwrap().mul(&seed_jet(RealSeed::Tanh, k, 0.1, x, 6).unwrap()).unwrap();
        let max = p.coeffs().iter().fold(0.0f64, |m, c| m.max(c.abs()));
        prop_assert!((0.5..=2.0).contains(&max));
    }
}
