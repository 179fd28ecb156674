use darboux_core::numkern::Jet;
use darboux_core::soliton::closed_form::TwoSoliton;
use darboux_core::soliton::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn spec(kappas: &[f64], taus: &[f64]) -> ValidatedSpec {
    validate_spec(&SolitonSpec::new(kappas, taus)).unwrap()
}

fn eigen_residual_real(psi: &Jet<f64>, v: f64, e: f64) -> f64 {
    let r = -psi.derivative_value(2) + (v - e) * psi.value();
    r.abs() / (psi.value().abs() * e.abs().max(1.0))
}

#[test]
fn validation_rules() {
    assert!(validate_spec(&SolitonSpec::new(&[1.0, 2.0], &[0.0, 0.0])).is_ok());
    assert!(matches!(
        validate_spec(&SolitonSpec::new(&[2.0, 1.0], &[0.0, 0.0])),
        Err(SolitonError::OrderingViolation { .. })
    ));
    assert!(matches!(
        validate_spec(&SolitonSpec::new(&[-1.0], &[0.0])),
        Err(SolitonError::NonPositiveKappa(_))
    ));
    let mut s = SolitonSpec::new(&[1.0, 2.0], &[0.0, 0.0]);
    s.seed_order = vec![1, 1];
    assert!(matches!(validate_spec(&s), Err(SolitonError::InvalidPermutation(_))));
    let free = spec(&[], &[]);
    assert_eq!(free.n(), 0);
    assert_eq!(potential(&free, 0.7).unwrap(), 0.0);
}

#[test]
fn chain_coefficients() {
    let one = spec(&[1.0], &[0.0]);
    let nodes = build_chain(&one);
    assert!((nodes[0].w(0.4, 0).unwrap().value() - 0.4f64.tanh()).abs() < 1e-15);
    assert_eq!(nodes[0].energy, -1.0);

    let perm = spec(&[1.0, 2.0], &[0.3, -0.2]).with_seed_order(&[2, 1]).unwrap();
    let nodes = build_chain(&perm);
    let x = 0.7;
    let want = 2.0 / (2.0 * (x - 0.2f64)).tanh();
    assert!((nodes[0].w(x, 0).unwrap().value() - want).abs() < 1e-14);
    assert_eq!(nodes[0].energy, -4.0);

    // A_2 = -A_1^dagger + w, so w_2 = -kappa_1 tanh y_1 - w
    let s = spec(&[1.0, 2.0], &[0.3, -0.2]);
    let cf = TwoSoliton::new([1.0, 2.0], [0.3, -0.2]);
    let nodes = build_chain(&s);
    for &x in &[-3.0, -0.2, 0.0, 0.9, 4.0] {
        let w2 = nodes[1].w(x, 0).unwrap().value();
        let want = -(1.0 * (x + 0.3f64)).tanh() - cf.w(x);
        assert!((w2 - want).abs() < 1e-13, "x={x}: {w2} vs {want}");
    }
}

#[test]
fn potential_examples() {
    assert!((potential(&spec(&[1.0], &[0.0]), 0.0).unwrap() + 2.0).abs() < 1e-14);
    assert!((potential(&spec(&[1.0, 2.0], &[0.0, 0.0]), 0.0).unwrap() + 6.0).abs() < 1e-13);
    let s = spec(&[1.0, 2.0], &[0.3, -0.2]);
    let cf = TwoSoliton::new([1.0, 2.0], [0.3, -0.2]);
    let v = potential(&s, 1.1).unwrap();
    assert!((v - cf.potential(1.1)).abs() <= 1e-10 * v.abs());
}

#[test]
fn poschl_teller_profile() {
    let k = 0.7;
    let s = spec(&[k, 2.0 * k], &[0.4, 0.4]);
    for &x in &[-5.0, -1.0, 0.0, 0.3, 2.0, 6.0] {
        let want = -6.0 * k * k / (k * (x + 0.4f64)).cosh().powi(2);
        assert!((potential(&s, x).unwrap() - want).abs() < 1e-12);
    }
}

#[test]
fn closed_form_oracle_agrees_with_chain() {
    for (kap, tau) in [([1.0, 2.0], [0.3, -0.2]), ([0.5, 1.7], [-1.0, 2.0]), ([1.2, 1.3], [0.0, 0.8])] {
        let s = spec(&kap, &tau);
        let cf = TwoSoliton::new(kap, tau);
        let chain = Chain::new(s.clone());
        for i in 0..41 {
            let x = -8.0 + 0.4 * i as f64;
            let v = chain.potential(x).unwrap();
            assert!((v - cf.potential(x)).abs() <= 1e-10 * v.abs().max(kap[0] * kap[0]));
            let w = -chain.log_wronskian_derivative(x, 0).unwrap().value();
            assert!((w - cf.w(x)).abs() <= 1e-12 * w.abs().max(1.0));
        }
    }
}

#[test]
fn two_soliton_identities_hold() {
    // dw/dx = V2/2, w^2 + 2 k1 w tanh y1 = V2/2 + k2^2 - k1^2, w^2 + 2 k2 w coth y2 = V2/2 + k1^2 - k2^2
    let (kap, tau) = ([0.8, 1.9], [0.2, -0.5]);
    let s = spec(&kap, &tau);
    let chain = Chain::new(s);
    for i in 0..41 {
        let x = -6.0 + 0.3 * i as f64 + 0.013;
        let w = chain.log_wronskian_derivative(x, 1).unwrap().scale_by(-1.0);
        let v = chain.potential(x).unwrap();
        let tol = 1e-10 * v.abs().max(1.0);
        let (w0, w1) = (w.value(), w.derivative_value(1));
        assert!((w1 - v / 2.0).abs() <= tol);
        let t1 = (kap[0] * (x + tau[0])).tanh();
        let c2 = 1.0 / (kap[1] * (x + tau[1])).tanh();
        assert!((w0 * w0 + 2.0 * kap[0] * w0 * t1 - v / 2.0 - kap[1].powi(2) + kap[0].powi(2)).abs() <= tol);
        assert!((w0 * w0 + 2.0 * kap[1] * w0 * c2 - v / 2.0 - kap[0].powi(2) + kap[1].powi(2)).abs() <= tol * 10.0);
    }
}

#[test]
fn wronskian_examples() {
    let s = spec(&[1.3], &[0.2]);
    let c0 = wronskian_log(&s, 0.0).unwrap().log_w - (1.3f64 * 0.2).cosh().ln();
    for &x in &[-3.0, 0.5, 2.0] {
        let w = wronskian_log(&s, x).unwrap();
        assert!((w.log_w - (1.3 * (x + 0.2f64)).cosh().ln() - c0).abs() < 1e-13);
    }
    let s = spec(&[1.0, 2.0], &[0.1, -0.3]);
    let a = wronskian_log(&s, 500.0).unwrap();
    let b = wronskian_log(&s, 510.0).unwrap();
    assert!(a.log_w.is_finite() && b.log_w.is_finite());
    assert!(((b.log_w - a.log_w) / 10.0 - 3.0).abs() < 1e-12);
    assert!((a.dlog_w - 3.0).abs() < 1e-12);
    let x = 0.37;
    assert!((-2.0 * wronskian_log(&s, x).unwrap().d2log_w - potential(&s, x).unwrap()).abs() < 1e-12);
}

#[test]
fn bound_states_match_closed_forms() {
    let one = spec(&[1.0], &[0.0]);
    let c = bound_state(&one, 1, 0.0, 0).unwrap().value();
    for &x in &[-4.0, -0.5, 1.0, 3.0] {
        let psi = bound_state(&one, 1, x, 0).unwrap().value();
        assert!((psi / c - 1.0 / x.cosh()).abs() < 1e-14);
    }
    let (kap, tau) = ([1.0, 2.0], [0.3, -0.2]);
    let s = spec(&kap, &tau);
    let cf = TwoSoliton::new(kap, tau);
    let x0 = 0.11;
    let r1 = bound_state(&s, 1, x0, 0).unwrap().value() / cf.ground(x0);
    let r2 = bound_state(&s, 2, x0, 0).unwrap().value() / cf.excited(x0);
    for i in 0..30 {
        let x = -7.0 + 0.5 * i as f64;
        let a = bound_state(&s, 1, x, 0).unwrap().value();
        assert!((a / r1 - cf.ground(x)).abs() <= 1e-12 * cf.ground(x).abs().max(1e-300));
        let b = bound_state(&s, 2, x, 0).unwrap().value();
        assert!((b / r2 - cf.excited(x)).abs() <= 1e-12 * cf.excited(x).abs().max(1e-300));
    }
    // regular at the csch pole
    assert!(bound_state(&s, 2, 0.2, 0).unwrap().value().is_finite());
}

#[test]
fn scattering_examples() {
    let one = spec(&[1.0], &[0.0]);
    let v = scatter_state(&one, 1.0, Direction::Right, 0.0, 0).unwrap().value();
    assert!((v - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    for &x in &[-2.0, 0.3, 1.5] {
        let edge = scatter_state(&one, 0.0, Direction::Right, x, 0).unwrap().value();
        assert!((edge + x.tanh()).norm() < 1e-15);
    }
    let s = spec(&[1.0, 2.0], &[0.0, 0.0]);
    let cf = TwoSoliton::new([1.0, 2.0], [0.0, 0.0]);
    for &(k, sign) in &[(1.0, 1.0), (0.6, -1.0)] {
        let dir = if sign > 0.0 { Direction::Right } else { Direction::Left };
        for &x in &[0.0, -1.3, 2.4] {
            let a = scatter_state(&s, k, dir, x, 0).unwrap().value();
            assert!((a - cf.scattering(k, sign, x)).norm() < 1e-13);
        }
    }
}

#[test]
fn transmission_examples() {
    let t = transmission(&spec(&[1.0], &[0.0]), 1.0).unwrap();
    assert!((t.closed_form - Complex64::new(0.0, -1.0)).norm() < 1e-15);
    assert!((t.asymptotic - t.closed_form).norm() < 1e-8);
    let t = transmission(&spec(&[1.0, 2.0], &[0.4, -0.1]), 0.7).unwrap();
    assert!((t.closed_form.norm() - 1.0).abs() < 1e-15);
    assert!((t.asymptotic.norm() - 1.0).abs() < 1e-8);
    assert!((t.asymptotic - t.closed_form).norm() < 1e-8);
}

#[test]
fn asymptotic_shifts() {
    let s = spec(&[1.0, 2.0], &[0.0, 0.0]);
    assert!((asymptotic_shift(&s, Receding::Second) - (1.0 / 3f64.sqrt()).asinh()).abs() < 1e-15);
    assert!((asymptotic_shift(&s, Receding::First) - (1.0 / 3f64.sqrt()).asinh() / 2.0).abs() < 1e-15);
    for (kap, tau1) in [([1.0, 2.0], 0.3), ([0.7, 1.1], -0.5)] {
        for &far in &[1.0, -1.0] {
            let t2 = far * 40.0 / kap[1];
            let s = spec(&kap, &[tau1, t2]);
            let xi = asymptotic_shift(&s, Receding::Second);
            // sending tau_2 to +-inf leaves sech^2 kappa_1 (x + tau_1 -+ xi_1)
            let c = well_center(&s, -tau1).unwrap();
            assert!((c + tau1 - far * xi).abs() < 1e-4, "center {c} tau1 {tau1} xi {xi} far {far}");
            let t1 = far * 40.0 / kap[0];
            let s = spec(&kap, &[t1, tau1]);
            let xi = asymptotic_shift(&s, Receding::First);
            let c = well_center(&s, -tau1).unwrap();
            assert!((c + tau1 - far * xi).abs() < 1e-4, "center {c} tau2 {tau1} xi {xi} far {far}");
        }
    }
}

#[test]
fn permuted_factorizations_give_the_same_potential() {
    let s = spec(&[0.6, 1.1, 1.9], &[0.3, -0.4, 0.8]);
    let perms = [[1, 2, 3], [2, 1, 3], [3, 1, 2], [2, 3, 1], [1, 3, 2], [3, 2, 1]];
    for i in 0..25 {
        let x = -6.0 + 0.5 * i as f64 + 0.031;
        let v0 = potential(&s, x).unwrap();
        for p in perms {
            let sp = s.with_seed_order(&p).unwrap();
            match potential(&sp, x) {
                Ok(v) => assert!((v - v0).abs() <= 1e-9 * v0.abs().max(1.0), "{p:?} x={x}: {v} vs {v0}"),
                Err(SolitonError::SingularChain { .. }) => {}
                Err(e) => panic!("{e}"),
            }
        }
    }
}

#[test]
fn permutation_swaps_bound_state_labels_only() {
    let s = spec(&[1.0, 2.0], &[0.3, -0.2]);
    let sp = s.with_seed_order(&[2, 1]).unwrap();
    for j in 1..=2 {
        let r = bound_state(&s, j, 1.7, 0).unwrap().value() / bound_state(&sp, j, 1.7, 0).unwrap().value();
        for &x in &[-3.0, -1.0, 0.9, 2.5] {
            let a = bound_state(&s, j, x, 0).unwrap().value();
            let b = bound_state(&sp, j, x, 0).unwrap().value();
            assert!((a - r * b).abs() <= 1e-10 * a.abs(), "j={j} x={x}");
        }
    }
}

#[test]
fn singular_permutations_are_flagged() {
    let s = spec(&[1.0, 2.0], &[0.3, -0.2]).with_seed_order(&[2, 1]).unwrap();
    assert!(matches!(potential(&s, 0.2), Err(SolitonError::SingularChain { level: 1, .. })));
    let pts = Chain::new(s).singular_points(-5.0, 5.0);
    assert_eq!(pts.len(), 1);
    assert!((pts[0] - 0.2).abs() < 1e-10);
}

fn spec_strategy() -> impl Strategy<Value = ValidatedSpec> {
    (1usize..=4)
        .prop_flat_map(|n| (prop::collection::vec(0.3f64..1.0, n), prop::collection::vec(-2.0f64..2.0, n)))
        .prop_map(|(gaps, taus)| {
            let mut k = 0.0;
            let kappas: Vec<f64> = gaps.iter().map(|g| {
                k += g;
                k
            }).collect();
            spec(&kappas, &taus)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chain_and_wronskian_routes_agree(s in spec_strategy(), u in -1.0f64..1.0) {
        let k1 = s.kappa(1);
        let x = u * 40.0 / k1;
        let v = potential(&s, x).unwrap();
        let w = wronskian_log(&s, x).unwrap();
        prop_assert!(w.log_w.is_finite());
        let scale = v.abs().max(k1 * k1);
        prop_assert!((v + 2.0 * w.d2log_w).abs() <= 1e-10 * scale, "x={} v={} wr={}", x, v, -2.0 * w.d2log_w);
    }

    #[test]
    fn bound_states_solve_the_eigenproblem(s in spec_strategy(), u in -1.0f64..1.0, jj in 0usize..4) {
        let j = jj % s.n() + 1;
        let x = u * 8.0 / s.kappa(1);
        let psi = bound_state(&s, j, x, 2).unwrap();
        let v = potential(&s, x).unwrap();
        prop_assert!(eigen_residual_real(&psi, v, -s.kappa(j).powi(2)) <= 1e-8);
    }

    #[test]
    fn scattering_states_solve_the_eigenproblem(s in spec_strategy(), u in -1.0f64..1.0, k in 0.05f64..4.0) {
        let x = u * 8.0 / s.kappa(1);
        let psi = scatter_state(&s, k, Direction::Right, x, 2).unwrap();
        let v = potential(&s, x).unwrap();
        let r = -psi.derivative_value(2) + psi.value() * (v - k * k);
        prop_assert!(r.norm() <= 1e-8 * psi.value().norm() * (k * k).max(1.0));
    }

    #[test]
    fn transmission_is_unimodular(s in spec_strategy(), k in 0.05f64..5.0) {
        prop_assert!((transmission_closed_form(&s, k).norm() - 1.0).abs() < 1e-14);
    }
}
