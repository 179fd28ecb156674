use super::coeff::Coeff;
use super::expr::Op;
use super::DiffError;
use crate::numkern::{seed_jet, RealSeed};
use crate::soliton::{Chain, ValidatedSpec};
use std::sync::Arc;

/// Relative tolerance for treating two kappas as equal.
pub const KAPPA_TOL: f64 = 1e-9;

pub fn kappas_coincide(a: f64, b: f64) -> bool {
    (a - b).abs() <= KAPPA_TOL * a.abs().max(b.abs())
}

/// One seed function `cosh` or `sinh` of `kappa (x + tau)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Seed {
    pub kind: RealSeed,
    pub kappa: f64,
    pub tau: f64,
}

impl Seed {
    pub fn cosh(kappa: f64, tau: f64) -> Seed {
        Seed { kind: RealSeed::Cosh, kappa, tau }
    }

    pub fn sinh(kappa: f64, tau: f64) -> Seed {
        Seed { kind: RealSeed::Sinh, kappa, tau }
    }

    pub fn of(spec: &ValidatedSpec, j: usize) -> Seed {
        Seed { kind: spec.kind(j), kappa: spec.kappa(j), tau: spec.tau(j) }
    }
}

/// A reduced intertwiner together with the constant of its first-order core.
#[derive(Clone, Debug)]
pub struct Reduced {
    pub op: Op,
    pub c: f64,
}

fn chain(spec: &ValidatedSpec) -> Arc<Chain> {
    Arc::new(Chain::new(spec.clone()))
}

/// `A_level = d/dx - w_level`.
pub fn darboux_factor(chain: &Arc<Chain>, level: usize) -> Op {
    Op::first_order(1.0, Coeff::chain_w(chain, level).scale(-1.0).with_label(&format!("-w_{level}")))
}

/// `A_n ... A_from`; the identity when `from > n`.
pub fn crum_tail(chain: &Arc<Chain>, from: usize) -> Op {
    Op::product((from..=chain.n()).rev().map(|l| darboux_factor(chain, l)).collect())
}

pub fn compose_a(spec: &ValidatedSpec) -> Op {
    crum_tail(&chain(spec), 1)
}

pub fn hamiltonian(spec: &ValidatedSpec) -> Op {
    Op::poly_h(&chain(spec), &[0.0])
}

pub fn intertwiner_y(upper: &ValidatedSpec, lower: &ValidatedSpec) -> Op {
    compose_a(upper).then(&compose_a(lower).adjoint())
}

pub fn intertwiner_x(upper: &ValidatedSpec, lower: &ValidatedSpec) -> Op {
    Op::product(vec![compose_a(upper), Op::d(), compose_a(lower).adjoint()])
}

pub fn lax_z(spec: &ValidatedSpec) -> Op {
    intertwiner_x(spec, spec)
}

/// `A_C = d/dx + C`.
pub fn a_c(c: f64) -> Op {
    Op::first_order(1.0, Coeff::constant(c))
}

/// Constant of `X_1(upper, lower)`: `kappa coth kappa(tau - tau')` for
/// seeds of the same kind, `kappa tanh kappa(tau - tau')` for mixed kinds
/// (the imaginary half-period shift turns coth into tanh).
pub fn shift_constant(upper: Seed, lower: Seed) -> Result<f64, DiffError> {
    if !kappas_coincide(upper.kappa, lower.kappa) {
        return Err(DiffError::CaseMismatch(format!("kappa {} vs {}", upper.kappa, lower.kappa)));
    }
    let k = upper.kappa;
    let d = k * (upper.tau - lower.tau);
    if upper.kind == lower.kind {
        if d == 0.0 {
            return Err(DiffError::DegenerateShift);
        }
        Ok(k / d.tanh())
    } else {
        Ok(k * d.tanh())
    }
}

/// `d/dx - (ln upper)' + (ln lower)' + C`.
pub fn breve_x1(upper: Seed, lower: Seed) -> Result<Reduced, DiffError> {
    let c = shift_constant(upper, lower)?;
    let coeff = Coeff::seed_log(lower.kind, lower.kappa, lower.tau)
        .sub(&Coeff::seed_log(upper.kind, upper.kappa, upper.tau))
        .add(&Coeff::constant(c));
    Ok(Reduced { op: Op::first_order(1.0, coeff), c })
}

pub fn reduced_x1(kappa: f64, tau: f64, tau_p: f64) -> Result<Op, DiffError> {
    Ok(breve_x1(Seed::cosh(kappa, tau), Seed::cosh(kappa, tau_p))?.op)
}

fn check_pair(upper: &ValidatedSpec, lower: &ValidatedSpec) -> Result<(), DiffError> {
    if upper.n() != lower.n() || upper.n() == 0 {
        return Err(DiffError::CaseMismatch(format!("sizes {} and {}", upper.n(), lower.n())));
    }
    Ok(())
}

/// `[A_n...A_2] X_1(s_r, s'_r') [A'_n...A'_2]^dagger` for two chains whose
/// first seeds share kappa.
pub fn breve_reduced(upper: &ValidatedSpec, lower: &ValidatedSpec) -> Result<Reduced, DiffError> {
    check_pair(upper, lower)?;
    let core = breve_x1(Seed::of(upper, upper.seed_at(1)), Seed::of(lower, lower.seed_at(1)))?;
    let op = Op::product(vec![crum_tail(&chain(upper), 2), core.op, crum_tail(&chain(lower), 2).adjoint()]);
    Ok(Reduced { op, c: core.c })
}

/// `[A_n...A_2][A'_n...A'_2]^dagger` for chains whose first seeds coincide.
pub fn breve_y(upper: &ValidatedSpec, lower: &ValidatedSpec) -> Result<Op, DiffError> {
    check_pair(upper, lower)?;
    let (a, b) = (Seed::of(upper, upper.seed_at(1)), Seed::of(lower, lower.seed_at(1)));
    if !kappas_coincide(a.kappa, b.kappa) || a.tau != b.tau || a.kind != b.kind {
        return Err(DiffError::CaseMismatch("first seeds differ".into()));
    }
    Ok(crum_tail(&chain(upper), 2).then(&crum_tail(&chain(lower), 2).adjoint()))
}

fn cyclic_from(n: usize, r: usize) -> Vec<usize> {
    (0..n).map(|i| (r - 1 + i) % n + 1).collect()
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head);
            out.push(p);
        }
    }
    out
}

/// Factorization starting with seed `r` whose intermediate chain has the
/// fewest singular points near the wells. The tail `A_n...A_2` does not
/// depend on the order of the remaining seeds, so this only trades one
/// exact representation for a better conditioned one. Ties keep the
/// cyclic order.
fn order_from(spec: &ValidatedSpec, r: usize) -> Result<ValidatedSpec, DiffError> {
    let n = spec.n();
    let cyclic = cyclic_from(n, r);
    let mut candidates = vec![cyclic.clone()];
    for p in permutations(&cyclic[1..]) {
        let mut o = vec![r];
        o.extend(p);
        if o != cyclic {
            candidates.push(o);
        }
    }
    let half = 8.0 / spec.kappa(1) + spec.extent();
    let mut best: Option<(usize, ValidatedSpec)> = None;
    for o in candidates {
        let v = spec.with_seed_order(&o)?;
        let count = Chain::new(v.clone()).singular_points(-half, half).len();
        if best.as_ref().map_or(true, |(c, _)| count < *c) {
            best = Some((count, v));
        }
    }
    Ok(best.expect("at least one ordering").1)
}

/// Reduced intertwiner for the coinciding pair `(r, r')`: upper chain
/// starts with seed `r`, lower with seed `r'`.
pub fn breve_for_pair(upper: &ValidatedSpec, lower: &ValidatedSpec, r: usize, rp: usize) -> Result<Reduced, DiffError> {
    check_pair(upper, lower)?;
    breve_reduced(&order_from(upper, r)?, &order_from(lower, rp)?)
}

/// `Y` analogue of [`breve_for_pair`] for a pair with equal shifts.
pub fn breve_y_for_pair(upper: &ValidatedSpec, lower: &ValidatedSpec, r: usize, rp: usize) -> Result<Op, DiffError> {
    check_pair(upper, lower)?;
    breve_y(&order_from(upper, r)?, &order_from(lower, rp)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// `kappa_1 = kappa_1'`.
    A,
    /// `kappa_2 = kappa_2'`, built on the sinh-first factorizations.
    B,
    /// `kappa_1 = kappa_2'`.
    AB,
}

pub fn reduced_x3(variant: Variant, upper: &ValidatedSpec, lower: &ValidatedSpec) -> Result<Reduced, DiffError> {
    if upper.n() != 2 || lower.n() != 2 {
        return Err(DiffError::CaseMismatch("third-order reductions need n = 2".into()));
    }
    let (r, rp) = match variant {
        Variant::A => (1, 1),
        Variant::B => (2, 2),
        Variant::AB => (1, 2),
    };
    if !kappas_coincide(upper.kappa(r), lower.kappa(rp)) {
        return Err(DiffError::CaseMismatch(format!("{variant:?} needs kappa_{r} = kappa'_{rp}")));
    }
    breve_for_pair(upper, lower, r, rp)
}

fn exact_iso(upper: &ValidatedSpec, lower: &ValidatedSpec) -> bool {
    upper.n() == lower.n() && upper.kappas().iter().zip(lower.kappas()).all(|(a, b)| kappas_coincide(*a, *b))
}

/// `X_5^(r)` of a three-soliton exactly isospectral pair.
pub fn reduced_x5_r(upper: &ValidatedSpec, lower: &ValidatedSpec, r: usize) -> Result<Reduced, DiffError> {
    if upper.n() != 3 || !exact_iso(upper, lower) {
        return Err(DiffError::NotExactIso);
    }
    breve_for_pair(upper, lower, r, r)
}

/// `d/dx + (w - w') + C` with `w = -(ln W)'`, `w' = -(ln W')'`.
pub fn hat_x1(upper: &ValidatedSpec, lower: &ValidatedSpec, c: f64) -> Op {
    let coeff = Coeff::log_wronskian(&chain(lower))
        .sub(&Coeff::log_wronskian(&chain(upper)))
        .add(&Coeff::constant(c))
        .with_label("W");
    Op::first_order(1.0, coeff)
}

/// `w kappa_2 coth kappa_2(x + tau_2)` for a two-soliton `w`, in the form
/// `(k1^2 - k2^2) k2 / (k2 - k1 tanh y1 tanh y2)` which has no pole.
fn w_coth(k1: f64, t1: f64, k2: f64, t2: f64) -> Coeff {
    Coeff::custom("w*k2 coth", Vec::new(), move |x, order| {
        let a = seed_jet(RealSeed::Tanh, k1, t1, x, order)?;
        let b = seed_jet(RealSeed::Tanh, k2, t2, x, order)?;
        let den = a.mul(&b)?.scale_by(-k1).add_constant(k2)?;
        Ok(den.recip()?.scale_by((k1 * k1 - k2 * k2) * k2))
    })
}

/// The second-order operator `G_2` of an exactly isospectral two-soliton
/// pair.
pub fn g2(upper: &ValidatedSpec, lower: &ValidatedSpec) -> Result<Op, DiffError> {
    if upper.n() != 2 || !exact_iso(upper, lower) {
        return Err(DiffError::NotExactIso);
    }
    let (k1, k2) = (upper.kappa(1), upper.kappa(2));
    let w = Coeff::log_wronskian(&chain(upper)).scale(-1.0);
    let wp = Coeff::log_wronskian(&chain(lower)).scale(-1.0);
    let zeroth = wp
        .derivative()
        .add(&w.mul(&wp))
        .add(&w_coth(k1, upper.tau(1), k2, upper.tau(2)))
        .add(&w_coth(k1, lower.tau(1), k2, lower.tau(2)))
        .add(&Coeff::constant(k2 * k2));
    Ok(Op::sum(vec![
        Op::d().then(&Op::d()).scale(-1.0),
        Op::multiply(wp.sub(&w)).then(&Op::d()),
        Op::multiply(zeroth),
    ]))
}

/// Irreducible generators of an exactly isospectral two-soliton pair.
#[derive(Clone, Debug)]
pub enum IsoGenerators {
    Generic {
        c1: f64,
        c2: f64,
        hat_y2: Op,
        hat_x3: Op,
        /// `(X_3^A - X_3^B) / (C_1 - C_2)`, the second route to `hat_y2`.
        hat_y2_difference: Op,
        /// `(C_2 X_3^A - C_1 X_3^B) / (C_2 - C_1)`.
        hat_x3_combination: Op,
        x3a: Op,
        x3b: Op,
        g2: Op,
        hat_x1: Op,
    },
    Special {
        c1: f64,
        hat_x1: Op,
    },
}

pub fn isospectral_generators_n2(
    upper: &ValidatedSpec,
    lower: &ValidatedSpec,
    tol: f64,
) -> Result<IsoGenerators, DiffError> {
    if upper.n() != 2 || !exact_iso(upper, lower) {
        return Err(DiffError::NotExactIso);
    }
    if (1..=2).any(|j| upper.tau(j) == lower.tau(j)) {
        return Err(DiffError::CaseMismatch("a shift coincides; use the common-seed reduction".into()));
    }
    let x3a = reduced_x3(Variant::A, upper, lower)?;
    let x3b = reduced_x3(Variant::B, upper, lower)?;
    let (c1, c2) = (x3a.c, x3b.c);
    let hx1 = hat_x1(upper, lower, c1);
    if (c1 - c2).abs() <= tol * c1.abs().max(1.0) {
        return Ok(IsoGenerators::Special { c1, hat_x1: hx1 });
    }
    let (k1, k2) = (upper.kappa(1), upper.kappa(2));
    let g = g2(upper, lower)?;
    let hat_y2 = g.add(&hx1.scale((k2 * k2 - k1 * k1) / (c1 - c2)));
    let hat_x3 = x3a.op.sub(&hat_y2.scale(c1));
    let hat_y2_difference = x3a.op.sub(&x3b.op).scale(1.0 / (c1 - c2));
    let hat_x3_combination = x3a.op.scale(c2).sub(&x3b.op.scale(c1)).scale(1.0 / (c2 - c1));
    Ok(IsoGenerators::Generic {
        c1,
        c2,
        hat_y2,
        hat_x3,
        hat_y2_difference,
        hat_x3_combination,
        x3a: x3a.op,
        x3b: x3b.op,
        g2: g,
        hat_x1: hx1,
    })
}

/// `tau_1'` that makes `C_1 = C_2` for a two-soliton pair.
pub fn special_tau1_prime(k1: f64, k2: f64, tau1: f64, tau2: f64, tau2p: f64) -> f64 {
    tau1 - (k1 * (k2 * (tau2 - tau2p)).tanh() / k2).atanh() / k1
}

/// Shifts `tau'` with all `C_j` equal to `C_n`, given the free `tau_n'`.
/// `|C_n| > kappa_n > kappa_j` makes every other equation solvable.
pub fn special_family_taus(kappas: &[f64], taus: &[f64], tau_np: f64) -> Vec<f64> {
    let n = kappas.len();
    let c = kappas[n - 1] / (kappas[n - 1] * (taus[n - 1] - tau_np)).tanh();
    (0..n)
        .map(|j| if j == n - 1 { tau_np } else { taus[j] - (kappas[j] / c).atanh() / kappas[j] })
        .collect()
}
