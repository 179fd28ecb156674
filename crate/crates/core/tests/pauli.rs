use darboux_core::diffop::special_tau1_prime;
use darboux_core::pauli::*;
use darboux_core::soliton::{validate_spec, SolitonSpec};
use darboux_core::susy::ExtendedSystem;
use proptest::prelude::*;

fn sys(k: &[f64], t: &[f64], kp: &[f64], tp: &[f64]) -> ExtendedSystem {
    let u = validate_spec(&SolitonSpec::new(k, t)).unwrap();
    let l = validate_spec(&SolitonSpec::new(kp, tp)).unwrap();
    ExtendedSystem::new(&u, &l, 1e-9).unwrap()
}

fn coth(x: f64) -> f64 {
    1.0 / x.tanh()
}

#[test]
fn one_soliton_gap_and_constant_phi() {
    let (kap, t, tp, k) = (1.0, 0.2, -0.4, 0.3);
    let s = sys(&[kap], &[t], &[kap], &[tp]);
    let c0 = kap * coth(kap * (t - tp)) - k;
    assert!((canonical_c0(&s, k, 2.0) - c0).abs() < 1e-14);
    let p = field_profile(&s, k, c0, 2.0);
    for &x in &p.grid {
        let a = p.a(x).unwrap();
        assert!((a + gap_profile(kap, t, tp, x) + k).abs() <= 1e-10, "x={x}");
    }
    let chk = constant_phi_check(&p).unwrap();
    let want = (kap * coth(kap * (t - tp))).powi(2);
    assert!(chk.is_constant && (chk.value - want).abs() <= 1e-10, "{chk:?}");
}

#[test]
fn special_two_soliton_phi_is_c1_squared() {
    let tp1 = special_tau1_prime(1.0, 2.0, 0.0, 0.0, 0.7);
    let s = sys(&[1.0, 2.0], &[0.0, 0.0], &[1.0, 2.0], &[tp1, 0.7]);
    let c1 = s.constants[0].value.unwrap();
    let p = field_profile(&s, 0.5, canonical_c0(&s, 0.5, 2.0), 2.0);
    let chk = constant_phi_check(&p).unwrap();
    assert!(chk.is_constant && (chk.value - c1 * c1).abs() <= 1e-9, "{chk:?} vs {}", c1 * c1);
}

#[test]
fn shifted_poschl_teller_needs_g_n() {
    for n in 2..=3usize {
        let kap: Vec<f64> = (1..=n).map(|j| j as f64 * 0.8).collect();
        let (t, tp) = (0.25, -0.35);
        let s = sys(&kap, &vec![t; n], &kap, &vec![tp; n]);
        let g = g_n(n);
        let p = field_profile(&s, 0.1, canonical_c0(&s, 0.1, g), g);
        let chk = constant_phi_check(&p).unwrap();
        let want = 0.5 * (n * (n + 1)) as f64 * (0.8 * coth(0.8 * (t - tp))).powi(2);
        assert!(chk.is_constant && (chk.value - want).abs() <= 1e-9 * want, "n={n} {chk:?} vs {want}");
        let p2 = field_profile(&s, 0.1, canonical_c0(&s, 0.1, 2.0), 2.0);
        assert!(!constant_phi_check(&p2).unwrap().is_constant, "n={n} constant at g = 2");
    }
    assert!((g_n(2) - 12f64.sqrt()).abs() < 1e-15);
}

#[test]
fn generic_and_broken_pairs_have_electric_fields() {
    let generic = sys(&[1.0, 2.0], &[0.0, 0.0], &[1.0, 2.0], &[0.3, 0.7]);
    let p = field_profile(&generic, 0.0, canonical_c0(&generic, 0.0, 2.0), 2.0);
    assert!(!constant_phi_check(&p).unwrap().is_constant);
    let brk = sys(&[1.0], &[0.2], &[1.5], &[-0.4]);
    assert_eq!(canonical_c0(&brk, 0.7, 2.0), 0.0);
    let chk = constant_phi_check(&field_profile(&brk, 0.7, 0.0, 2.0)).unwrap();
    assert!(chk.deviation > 0.01, "{chk:?}");
}

fn check_invariants(s: &ExtendedSystem, k: f64, c0: f64, g: f64) {
    let p = field_profile(s, k, c0, g);
    for &x in &p.grid {
        let (bz, da) = (p.bz(x).unwrap(), p.da(x).unwrap());
        assert!((bz - da).abs() <= 1e-10 * bz.abs().max(1.0), "x={x} bz={bz} a'={da}");
        if g == 2.0 {
            let (vp, vm) = p.reconstructed(x).unwrap();
            let (v, vl) = p.potentials(x).unwrap();
            assert!((vp - v).abs() <= 1e-9 * v.abs().max(1.0) && (vm - vl).abs() <= 1e-9 * vl.abs().max(1.0));
        }
    }
}

#[test]
fn field_invariants_on_fixed_pairs() {
    check_invariants(&sys(&[1.0, 2.0], &[0.3, -0.2], &[1.5, 2.5], &[-0.1, 0.4]), 0.4, 0.1, 2.0);
    check_invariants(&sys(&[1.0, 2.0], &[0.2, 0.2], &[1.0, 2.0], &[-0.3, -0.3]), 0.0, 0.0, g_n(2));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn gauge_shift_moves_a_not_bz(
        k1 in 0.6f64..1.4, kp1 in 0.6f64..1.4, t in -0.5f64..0.5, tp in -0.5f64..0.5,
        k in -1.0f64..1.0, c0 in -1.0f64..1.0, dc in -1.0f64..1.0,
    ) {
        let s = sys(&[k1], &[t], &[kp1], &[tp]);
        let (p, q) = (field_profile(&s, k, c0, 2.0), field_profile(&s, k, c0 + dc, 2.0));
        for &x in &p.grid {
            prop_assert!((q.a(x).unwrap() - p.a(x).unwrap() - dc).abs() <= 1e-12);
            prop_assert_eq!(q.bz(x).unwrap(), p.bz(x).unwrap());
            let dphi = (q.a(x).unwrap() + k).powi(2) - (p.a(x).unwrap() + k).powi(2);
            prop_assert!((q.phi(x).unwrap() - p.phi(x).unwrap() - dphi).abs() <= 1e-10 * dphi.abs().max(1.0));
        }
        check_invariants(&s, k, c0, 2.0);
    }
}
