use super::residual::{op_residual, ResidualReport};
use super::suite::{default_suite, standard_grid, TestFunction};
use crate::diffop::{
    a_c, breve_for_pair, breve_x1, breve_y_for_pair, hat_x1, intertwiner_x, intertwiner_y, isospectral_generators_n2,
    lax_z, special_tau1_prime, Coeff, DiffError, IsoGenerators, Op, Seed, KAPPA_TOL,
};
use crate::numkern::RealSeed;
use crate::soliton::{validate_spec, SolitonSpec};
use crate::susy::{default_threshold, merge_reports, ExtendedSystem, IsoClass, SusyError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::sync::{Arc, OnceLock};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("no identity record {0}")]
    UnknownId(String),
    #[error("{id} does not apply: {reason}")]
    NotApplicable { id: String, reason: String },
    #[error(transparent)]
    Diff(#[from] DiffError),
    #[error(transparent)]
    Susy(#[from] SusyError),
}

/// Named parameter sets, one per isospectrality pattern the registry covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Canonical {
    OneBreak,
    OneSelfIso,
    TwoBreak,
    /// `kappa_1 = kappa'_1`.
    Break1,
    /// `kappa_2 = kappa'_2`.
    Break2,
    /// `kappa_1 = kappa'_2`.
    Break3,
    /// `kappa_1 = kappa'_1` and `tau_1 = tau'_1`.
    CommonShift,
    CommonVirtual,
    TwoExact,
    TwoSpecial,
    ThreeExact,
    /// Scalar identities; no operator pair.
    Angles,
}

impl Canonical {
    pub fn specs(self) -> Option<(SolitonSpec, SolitonSpec)> {
        let p = |k: &[f64], t: &[f64], kp: &[f64], tp: &[f64]| Some((SolitonSpec::new(k, t), SolitonSpec::new(kp, tp)));
        match self {
            Canonical::OneBreak => p(&[1.0], &[0.2], &[1.7], &[-0.4]),
            Canonical::OneSelfIso => p(&[1.0], &[0.2], &[1.0], &[-0.4]),
            Canonical::TwoBreak => p(&[1.0, 2.0], &[0.3, -0.2], &[1.5, 2.5], &[-0.1, 0.4]),
            Canonical::Break1 => p(&[1.0, 2.0], &[0.4, 0.1], &[1.0, 2.5], &[-0.1, -0.3]),
            Canonical::Break2 => p(&[1.0, 2.0], &[0.4, 0.1], &[1.5, 2.0], &[-0.1, -0.3]),
            Canonical::Break3 => p(&[1.0, 2.0], &[0.4, 0.1], &[0.5, 1.0], &[-0.1, -0.3]),
            Canonical::CommonShift => p(&[1.0, 2.0], &[0.3, -0.2], &[1.0, 2.5], &[0.3, 0.5]),
            Canonical::CommonVirtual => p(&[1.0, 2.0], &[0.3, -0.2], &[1.0, 2.0], &[0.3, 0.5]),
            Canonical::TwoExact => p(&[1.0, 2.0], &[0.0, 0.0], &[1.0, 2.0], &[0.3, 0.7]),
            Canonical::TwoSpecial => {
                let t1 = special_tau1_prime(1.0, 2.0, 0.0, 0.0, 0.7);
                p(&[1.0, 2.0], &[0.0, 0.0], &[1.0, 2.0], &[t1, 0.7])
            }
            Canonical::ThreeExact => p(&[1.0, 2.0, 3.0], &[0.2, -0.1, 0.3], &[1.0, 2.0, 3.0], &[-0.3, 0.4, -0.2]),
            Canonical::Angles => None,
        }
    }

    pub fn system(self) -> Option<Result<ExtendedSystem, VerifyError>> {
        let (u, l) = self.specs()?;
        Some((|| {
            let (u, l) = (validate_spec(&u).map_err(DiffError::from)?, validate_spec(&l).map_err(DiffError::from)?);
            Ok(ExtendedSystem::new(&u, &l, KAPPA_TOL)?)
        })())
    }
}

/// One operator equality of a record, both sides acting on scalar functions.
#[derive(Clone, Debug)]
pub struct IdentityTerm {
    pub label: String,
    pub lhs: Op,
    pub rhs: Op,
}

type Builder = Arc<dyn Fn(&ExtendedSystem) -> Result<Vec<IdentityTerm>, DiffError> + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Operator(Builder),
    /// `1 - tanh a tanh b - coth(a - b)(tanh a - tanh b) = 0`.
    Trig,
}

#[derive(Clone)]
pub struct IdentityRecord {
    pub id: String,
    /// Family of products or reductions the record belongs to.
    pub group: &'static str,
    pub statement: String,
    pub canonical: Canonical,
    /// Set on records generated by Hermitian conjugation of another record.
    pub conjugate_of: Option<String>,
    applies: fn(&ExtendedSystem) -> bool,
    kind: Kind,
}

impl std::fmt::Debug for IdentityRecord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IdentityRecord").field("id", &self.id).field("statement", &self.statement).finish()
    }
}

impl IdentityRecord {
    pub fn applies_to(&self, sys: &ExtendedSystem) -> bool {
        matches!(self.kind, Kind::Operator(_)) && (self.applies)(sys)
    }

    pub fn is_scalar(&self) -> bool {
        matches!(self.kind, Kind::Trig)
    }

    /// Both sides of every equality, for a system the record applies to.
    pub fn terms(&self, sys: &ExtendedSystem) -> Result<Vec<IdentityTerm>, VerifyError> {
        match &self.kind {
            Kind::Operator(b) if (self.applies)(sys) => Ok(b(sys)?),
            Kind::Operator(_) => Err(self.not_applicable(format!("class {}, n = {}", sys.class.tag(), sys.n()))),
            Kind::Trig => Err(self.not_applicable("scalar identity".into())),
        }
    }

    fn not_applicable(&self, reason: String) -> VerifyError {
        VerifyError::NotApplicable { id: self.id.clone(), reason }
    }
}

/// Parameters of one evaluation.
pub enum IdentityInput<'a> {
    System(&'a ExtendedSystem),
    Angles(&'a [(f64, f64)]),
}

// ---------------------------------------------------------------------
// Operators of a pair

struct Pair<'a> {
    sys: &'a ExtendedSystem,
}

impl Pair<'_> {
    /// `prod (H + a)` with `a` already squared.
    fn h(&self, a: &[f64]) -> Op {
        Op::poly_h(&self.sys.upper_chain, a)
    }

    fn hp(&self, a: &[f64]) -> Op {
        Op::poly_h(&self.sys.lower_chain, a)
    }

    fn k2(&self) -> Vec<f64> {
        self.sys.upper.kappas().iter().map(|k| k * k).collect()
    }

    fn kp2(&self) -> Vec<f64> {
        self.sys.lower.kappas().iter().map(|k| k * k).collect()
    }

    fn with_zero(v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0];
        out.extend_from_slice(v);
        out
    }

    fn x(&self) -> Op {
        intertwiner_x(&self.sys.upper, &self.sys.lower)
    }

    fn y(&self) -> Op {
        intertwiner_y(&self.sys.upper, &self.sys.lower)
    }

    fn z(&self) -> Op {
        lax_z(&self.sys.upper)
    }

    fn zp(&self) -> Op {
        lax_z(&self.sys.lower)
    }

    fn seeds(&self, j: usize, jp: usize) -> (Seed, Seed) {
        (Seed::of(&self.sys.upper, j), Seed::of(&self.sys.lower, jp))
    }

    /// The single coinciding pair of a partially broken system and the
    /// other levels: `(j, j', kappa_i^2, kappa_d^2, kappa'_d^2)`.
    fn partial_levels(&self) -> Result<(usize, usize, f64, f64, f64), DiffError> {
        let c = self.sys.constants.first().ok_or_else(|| DiffError::CaseMismatch("no coinciding pair".into()))?;
        let (j, jp) = (c.j, c.jp);
        let (ki, kd, kdp) = (self.sys.upper.kappa(j), self.sys.upper.kappa(3 - j), self.sys.lower.kappa(3 - jp));
        Ok((j, jp, ki * ki, kd * kd, kdp * kdp))
    }

    fn constant(&self, j: usize, jp: usize) -> Result<f64, DiffError> {
        self.sys
            .constants
            .iter()
            .find(|c| c.j == j && c.jp == jp)
            .and_then(|c| c.value)
            .ok_or_else(|| DiffError::CaseMismatch(format!("no finite shift constant for ({j}, {jp})")))
    }
}

fn t(label: &str, lhs: Op, rhs: Op) -> IdentityTerm {
    IdentityTerm { label: label.into(), lhs, rhs }
}

fn p(s: &ExtendedSystem) -> Pair<'_> {
    Pair { sys: s }
}

// ---------------------------------------------------------------------
// Applicability

fn pair_finite(s: &ExtendedSystem, j: usize, jp: usize) -> bool {
    s.constants.iter().any(|c| c.j == j && c.jp == jp && c.value.is_some())
}

fn one_break(s: &ExtendedSystem) -> bool {
    s.n() == 1 && s.class == IsoClass::CompleteBreak
}

fn one_self_iso(s: &ExtendedSystem) -> bool {
    s.n() == 1 && pair_finite(s, 1, 1)
}

fn any_break(s: &ExtendedSystem) -> bool {
    s.class == IsoClass::CompleteBreak
}

fn two_partial(s: &ExtendedSystem) -> bool {
    s.n() == 2
        && matches!(s.class, IsoClass::PartialSameLevel { .. } | IsoClass::PartialCrossLevel { .. })
        && s.constants[0].value.is_some()
}

fn two_common_shift(s: &ExtendedSystem) -> bool {
    s.n() == 2 && matches!(s.class, IsoClass::PartialSameLevel { tau_equal: true, .. }) && s.constants[0].value.is_none()
}

fn two_common_virtual(s: &ExtendedSystem) -> bool {
    s.n() == 2 && matches!(s.class, IsoClass::ExactCommonVirtual { .. })
}

fn two_exact(s: &ExtendedSystem) -> bool {
    s.n() == 2 && s.class == IsoClass::ExactGeneric
}

fn two_special(s: &ExtendedSystem) -> bool {
    s.n() == 2 && s.class == IsoClass::SpecialCequal
}

fn has_a(s: &ExtendedSystem) -> bool {
    s.n() == 2 && pair_finite(s, 1, 1)
}

fn has_b(s: &ExtendedSystem) -> bool {
    s.n() == 2 && pair_finite(s, 2, 2)
}

fn has_ab(s: &ExtendedSystem) -> bool {
    s.n() == 2 && pair_finite(s, 1, 2)
}

fn three_exact(s: &ExtendedSystem) -> bool {
    s.n() == 3 && (1..=3).all(|r| pair_finite(s, r, r))
}

fn never(_: &ExtendedSystem) -> bool {
    false
}

// ---------------------------------------------------------------------
// Builders

fn complete_break_products(s: &ExtendedSystem, line: usize) -> Result<Vec<IdentityTerm>, DiffError> {
    let q = p(s);
    let (k2, kp2) = (q.k2(), q.kp2());
    let both: Vec<f64> = [k2.clone(), kp2.clone()].concat();
    let (x, y, z, zp) = (q.x(), q.y(), q.z(), q.zp());
    Ok(match line {
        1 => vec![
            t("X X^+", x.then(&x.adjoint()), q.h(&Pair::with_zero(&both))),
            t("X^+ X", x.adjoint().then(&x), q.hp(&Pair::with_zero(&both))),
        ],
        2 => vec![t("Y Y^+", y.then(&y.adjoint()), q.h(&both)), t("Y^+ Y", y.adjoint().then(&y), q.hp(&both))],
        3 => vec![
            t("X Y^+", x.then(&y.adjoint()), q.h(&kp2).then(&z)),
            t("-Y X^+", y.then(&x.adjoint()).scale(-1.0), q.h(&kp2).then(&z)),
            t("Y^+ X", y.adjoint().then(&x), q.hp(&k2).then(&zp)),
            t("-X^+ Y", x.adjoint().then(&y).scale(-1.0), q.hp(&k2).then(&zp)),
        ],
        4 => vec![
            t("Z X", z.then(&x), q.h(&Pair::with_zero(&k2)).then(&y).scale(-1.0)),
            t("X Z'", x.then(&zp), q.h(&Pair::with_zero(&kp2)).then(&y).scale(-1.0)),
        ],
        5 => vec![t("Z Y", z.then(&y), q.h(&k2).then(&x)), t("Y Z'", y.then(&zp), q.h(&kp2).then(&x))],
        6 => {
            let sq = |v: &[f64]| [v, v].concat();
            vec![
                t("Z Z^+", z.then(&z.adjoint()), q.h(&Pair::with_zero(&sq(&k2)))),
                t("-Z^2", z.then(&z).scale(-1.0), q.h(&Pair::with_zero(&sq(&k2)))),
                t("Z' Z'^+", zp.then(&zp.adjoint()), q.hp(&Pair::with_zero(&sq(&kp2)))),
                t("-Z'^2", zp.then(&zp).scale(-1.0), q.hp(&Pair::with_zero(&sq(&kp2)))),
            ]
        }
        _ => unreachable!(),
    })
}

/// The `n`-soliton forms, which use only `H` on the right.
fn nsoliton_products(s: &ExtendedSystem, line: usize) -> Result<Vec<IdentityTerm>, DiffError> {
    let q = p(s);
    let (k2, kp2) = (q.k2(), q.kp2());
    let both: Vec<f64> = [k2.clone(), kp2.clone()].concat();
    let (x, y, z, zp) = (q.x(), q.y(), q.z(), q.zp());
    Ok(match line {
        1 => vec![
            t("Y Y^+", y.then(&y.adjoint()), q.h(&both)),
            t("X X^+", x.then(&x.adjoint()), q.h(&Pair::with_zero(&both))),
        ],
        2 => vec![
            t("X Y^+", x.then(&y.adjoint()), q.h(&kp2).then(&z)),
            t("-Y X^+", y.then(&x.adjoint()).scale(-1.0), q.h(&kp2).then(&z)),
        ],
        3 => vec![t("Z Y", z.then(&y), q.h(&k2).then(&x)), t("Y Z'", y.then(&zp), q.h(&kp2).then(&x))],
        4 => vec![
            t("Z X", z.then(&x), q.h(&Pair::with_zero(&k2)).then(&y).scale(-1.0)),
            t("X Z'", x.then(&zp), q.h(&Pair::with_zero(&kp2)).then(&y).scale(-1.0)),
        ],
        5 => vec![t("Z^2", z.then(&z), q.h(&Pair::with_zero(&[k2.clone(), k2].concat())).scale(-1.0))],
        _ => unreachable!(),
    })
}

fn nsoliton_mirror(s: &ExtendedSystem) -> Result<Vec<IdentityTerm>, DiffError> {
    let q = p(s);
    let (u, l) = (&s.upper, &s.lower);
    Ok(vec![
        t("X^+", q.x().adjoint(), intertwiner_x(l, u).scale(-1.0)),
        t("Y^+", q.y().adjoint(), intertwiner_y(l, u)),
        t("Z^+", q.z().adjoint(), q.z().scale(-1.0)),
    ])
}

fn self_iso_products(s: &ExtendedSystem, line: usize) -> Result<Vec<IdentityTerm>, DiffError> {
    let q = p(s);
    let (a, b) = q.seeds(1, 1);
    let red = breve_x1(a, b)?;
    let (xb, c) = (red.op, red.c);
    let k2 = q.k2()[0];
    let (y, z, zp) = (q.y(), q.z(), q.zp());
    let hk = q.h(&[k2]);
    Ok(match line {
        1 => vec![
            t("Xb Xb^+", xb.then(&xb.adjoint()), q.h(&[c * c])),
            t("Xb^+ Xb", xb.adjoint().then(&xb), q.hp(&[c * c])),
        ],
        2 => vec![
            t("Xb Y^+", xb.then(&y.adjoint()), z.add(&hk.scale(c))),
            t("Y Xb^+", y.then(&xb.adjoint()), z.scale(-1.0).add(&hk.scale(c))),
        ],
        3 => {
            let rhs = hk.then(&xb).scale(c).sub(&q.h(&[c * c]).then(&y));
            vec![t("Z Xb", z.then(&xb), rhs.clone()), t("Xb Z'", xb.then(&zp), rhs)]
        }
        4 => {
            let rhs = hk.then(&hk.then(&xb).sub(&y.scale(c)));
            vec![t("Z Y", z.then(&y), rhs.clone()), t("Y Z'", y.then(&zp), rhs)]
        }
        _ => unreachable!(),
    })
}

fn partial_products(s: &ExtendedSystem, line: usize) -> Result<Vec<IdentityTerm>, DiffError> {
    let q = p(s);
    let (j, jp, ki, kd, kdp) = q.partial_levels()?;
    let c = q.constant(j, jp)?;
    let xb = breve_for_pair(&s.upper, &s.lower, j, jp)?.op;
    let (y, z, zp) = (q.y(), q.z(), q.zp());
    let (hi, hd, hdp, hc) = (q.h(&[ki]), q.h(&[kd]), q.h(&[kdp]), q.h(&[c * c]));
    Ok(match line {
        1 => vec![
            t("Xb Xb^+", xb.then(&xb.adjoint()), q.h(&[c * c, kd, kdp])),
            t("Y Y^+", y.then(&y.adjoint()), q.h(&[ki, ki, kd, kdp])),
        ],
        2 => {
            let cm = q.h(&[ki, kd]).scale(c);
            vec![
                t("Xb Y^+", xb.then(&y.adjoint()), hdp.then(&z.add(&cm))),
                t("Y Xb^+", y.then(&xb.adjoint()), hdp.then(&z.scale(-1.0).add(&cm))),
            ]
        }
        3 => {
            let inner = hi.then(&xb).sub(&y.scale(c));
            vec![
                t("Z Y", z.then(&y), hi.then(&hd).then(&inner)),
                t("Y Z'", y.then(&zp), hi.then(&hdp).then(&inner)),
            ]
        }
        4 => {
            let inner = hi.then(&xb).scale(c).sub(&hc.then(&y));
            vec![t("Z Xb", z.then(&xb), hd.then(&inner)), t("Xb Z'", xb.then(&zp), hdp.then(&inner))]
        }
        _ => unreachable!(),
    })
}

fn common_shift_products(s: &ExtendedSystem, line: usize) -> Result<Vec<IdentityTerm>, DiffError> {
    let q = p(s);
    let (j, jp, ki, kd, kdp) = q.partial_levels()?;
    let yb = breve_y_for_pair(&s.upper, &s.lower, j, jp)?;
    let (x, z, zp) = (q.x(), q.z(), q.zp());
    Ok(match line {
        1 => vec![
            t("Yb Yb^+", yb.then(&yb.adjoint()), q.h(&[kd, kdp])),
            t("X X^+", x.then(&x.adjoint()), q.h(&[0.0, ki, ki, kd, kdp])),
        ],
        2 => vec![
            t("X Yb^+", x.then(&yb.adjoint()), q.h(&[kdp]).then(&z)),
            t("-Yb X^+", yb.then(&x.adjoint()).scale(-1.0), q.h(&[kdp]).then(&z)),
            t("Yb^+ X", yb.adjoint().then(&x), q.hp(&[kd]).then(&zp)),
            t("-X^+ Yb", x.adjoint().then(&yb).scale(-1.0), q.hp(&[kd]).then(&zp)),
        ],
        3 => vec![
            t("Z X", z.then(&x), q.h(&[0.0, ki, ki, kd]).then(&yb).scale(-1.0)),
            t("X Z'", x.then(&zp), q.h(&[0.0, ki, ki, kdp]).then(&yb).scale(-1.0)),
        ],
        4 => vec![t("Z Yb", z.then(&yb), q.h(&[kd]).then(&x)), t("Yb Z'", yb.then(&zp), q.h(&[kdp]).then(&x))],
        _ => unreachable!(),
    })
}

fn common_virtual_products(s: &ExtendedSystem, line: usize) -> Result<Vec<IdentityTerm>, DiffError> {
    let IsoClass::ExactCommonVirtual { j } = s.class else {
        return Err(DiffError::CaseMismatch("needs a common virtual system".into()));
    };
    let o = 3 - j;
    let q = p(s);
    let c = q.constant(o, o)?;
    let yb = breve_y_for_pair(&s.upper, &s.lower, j, j)?;
    let xb = breve_for_pair(&s.upper, &s.lower, o, o)?.op;
    let k2 = q.k2();
    let (kj, ko) = (k2[j - 1], k2[o - 1]);
    let (z, zp) = (q.z(), q.zp());
    let (h12, hp12) = (q.h(&k2).scale(c), q.hp(&k2).scale(c));
    Ok(match line {
        1 => vec![
            t("Yb Yb^+", yb.then(&yb.adjoint()), q.h(&[ko, ko])),
            t("Yb^+ Yb", yb.adjoint().then(&yb), q.hp(&[ko, ko])),
            t("Xb Xb^+", xb.then(&xb.adjoint()), q.h(&[c * c, kj, kj])),
            t("Xb^+ Xb", xb.adjoint().then(&xb), q.hp(&[c * c, kj, kj])),
        ],
        2 => vec![
            t("Xb Yb^+", xb.then(&yb.adjoint()), z.add(&h12)),
            t("Yb Xb^+", yb.then(&xb.adjoint()), z.scale(-1.0).add(&h12)),
        ],
        3 => vec![
            t("Xb^+ Yb", xb.adjoint().then(&yb), zp.scale(-1.0).add(&hp12)),
            t("Yb^+ Xb", yb.adjoint().then(&xb), zp.add(&hp12)),
        ],
        4 => {
            let r = q.h(&[ko, ko]).then(&xb).sub(&h12.then(&yb));
            let rd = hp12.then(&yb.adjoint()).sub(&q.hp(&[ko, ko]).then(&xb.adjoint()));
            vec![
                t("Z Yb", z.then(&yb), r.clone()),
                t("Yb Z'", yb.then(&zp), r),
                t("Yb^+ Z", yb.adjoint().then(&z), rd.clone()),
                t("Z' Yb^+", zp.then(&yb.adjoint()), rd),
            ]
        }
        5 => {
            let r = h12.then(&xb).sub(&q.h(&[c * c, kj, kj]).then(&yb));
            let rd = q.hp(&[c * c, kj, kj]).then(&yb.adjoint()).sub(&hp12.then(&xb.adjoint()));
            vec![
                t("Z Xb", z.then(&xb), r.clone()),
                t("Xb Z'", xb.then(&zp), r),
                t("Xb^+ Z", xb.adjoint().then(&z), rd.clone()),
                t("Z' Xb^+", zp.then(&xb.adjoint()), rd),
            ]
        }
        _ => unreachable!(),
    })
}

fn generic_pair(s: &ExtendedSystem) -> Result<(f64, f64, Op, Op, Op, Op), DiffError> {
    match isospectral_generators_n2(&s.upper, &s.lower, KAPPA_TOL)? {
        IsoGenerators::Generic { c1, c2, hat_y2, hat_x3, x3a, x3b, .. } => Ok((c1, c2, x3a, x3b, hat_y2, hat_x3)),
        IsoGenerators::Special { .. } => Err(DiffError::CaseMismatch("shift constants coincide".into())),
    }
}

/// `epsilon^{ij}` with `epsilon^{12} = 1`, indices from 1.
fn eps(i: usize, j: usize) -> f64 {
    match (i, j) {
        (1, 2) => 1.0,
        (2, 1) => -1.0,
        _ => 0.0,
    }
}

fn exact_generic_products(s: &ExtendedSystem, line: usize) -> Result<Vec<IdentityTerm>, DiffError> {
    let q = p(s);
    let (c1, c2, xa, xb, _, _) = generic_pair(s)?;
    let cs = [c1, c2];
    let xs = [xa, xb];
    let k2 = q.k2();
    let dc = c2 - c1;
    let (z, zp) = (q.z(), q.zp());
    let mut v = Vec::new();
    match line {
        1 => {
            for i in 1..=2 {
                for j in 1..=2 {
                    let (xi, xj) = (&xs[i - 1], &xs[j - 1]);
                    let cij = cs[i - 1] * cs[j - 1];
                    let dij = cs[i - 1] - cs[j - 1];
                    // each reduced operator keeps the level it is not built on
                    let (oi, oj) = (k2[2 - i], k2[2 - j]);
                    v.push(t(
                        &format!("X{i} X{j}^+"),
                        xi.then(&xj.adjoint()),
                        q.h(&[oi, oj, cij]).sub(&z.scale(dij)),
                    ));
                    v.push(t(
                        &format!("X{i}^+ X{j}"),
                        xi.adjoint().then(xj),
                        q.hp(&[oi, oj, cij]).add(&zp.scale(dij)),
                    ));
                }
            }
        }
        2 | 3 => {
            for i in 1..=2 {
                let j = 3 - i;
                let sign = if i == 1 { -1.0 } else { 1.0 };
                let (xi, xj) = (&xs[i - 1], &xs[j - 1]);
                let cii = cs[i - 1] * cs[i - 1];
                if line == 2 {
                    let rhs = q
                        .h(&[k2[0], k2[1], c1 * c2])
                        .then(xi)
                        .scale(sign)
                        .add(&q.h(&[cii, k2[j - 1], k2[j - 1]]).then(xj).scale(eps(i, j)))
                        .scale(-1.0 / dc);
                    v.push(t(&format!("Z X{i}"), z.then(xi), rhs.clone()));
                    v.push(t(&format!("X{i} Z'"), xi.then(&zp), rhs));
                } else {
                    let rhs = q
                        .hp(&[k2[0], k2[1], c1 * c2])
                        .then(&xi.adjoint())
                        .scale(sign)
                        .add(&q.hp(&[cii, k2[j - 1], k2[j - 1]]).then(&xj.adjoint()).scale(eps(i, j)))
                        .scale(1.0 / dc);
                    v.push(t(&format!("X{i}^+ Z"), xi.adjoint().then(&z), rhs.clone()));
                    v.push(t(&format!("Z' X{i}^+"), zp.then(&xi.adjoint()), rhs));
                }
            }
        }
        _ => unreachable!(),
    }
    Ok(v)
}

fn special_products(s: &ExtendedSystem, line: usize) -> Result<Vec<IdentityTerm>, DiffError> {
    let q = p(s);
    let c = q.constant(1, 1)?;
    let xh = hat_x1(&s.upper, &s.lower, c);
    let k2 = q.k2();
    let (y, z, zp) = (q.y(), q.z(), q.zp());
    let (h12, hp12) = (q.h(&k2), q.hp(&k2));
    Ok(match line {
        1 => vec![
            t("Xh Xh^+", xh.then(&xh.adjoint()), q.h(&[c * c])),
            t("Xh^+ Xh", xh.adjoint().then(&xh), q.hp(&[c * c])),
            t("Y Y^+", y.then(&y.adjoint()), q.h(&[k2[0], k2[0], k2[1], k2[1]])),
            t("Y^+ Y", y.adjoint().then(&y), q.hp(&[k2[0], k2[0], k2[1], k2[1]])),
        ],
        2 => vec![
            t("Xh Y^+", xh.then(&y.adjoint()), z.add(&h12.scale(c))),
            t("Y Xh^+", y.then(&xh.adjoint()), z.scale(-1.0).add(&h12.scale(c))),
        ],
        3 => {
            let r = h12.then(&xh).scale(c).sub(&q.h(&[c * c]).then(&y));
            let rd = q.hp(&[c * c]).then(&y.adjoint()).sub(&hp12.then(&xh.adjoint()).scale(c));
            vec![
                t("Z Xh", z.then(&xh), r.clone()),
                t("Xh Z'", xh.then(&zp), r),
                t("Xh^+ Z", xh.adjoint().then(&z), rd.clone()),
                t("Z' Xh^+", zp.then(&xh.adjoint()), rd),
            ]
        }
        4 => {
            let r = h12.then(&h12.then(&xh).sub(&y.scale(c)));
            let rd = hp12.then(&y.adjoint().scale(c).sub(&hp12.then(&xh.adjoint())));
            vec![
                t("Y Z'", y.then(&zp), r.clone()),
                t("Z Y", z.then(&y), r),
                t("Z' Y^+", zp.then(&y.adjoint()), rd.clone()),
                t("Y^+ Z", y.adjoint().then(&z), rd),
            ]
        }
        _ => unreachable!(),
    })
}

/// `X = (H + kappa_r^2) Xbr - C Y` for the pair `(r, r')`.
fn reduction(s: &ExtendedSystem, r: usize, rp: usize) -> Result<Vec<IdentityTerm>, DiffError> {
    let q = p(s);
    let red = breve_for_pair(&s.upper, &s.lower, r, rp)?;
    let k = s.upper.kappa(r);
    let rhs = q.h(&[k * k]).then(&red.op).sub(&q.y().scale(red.c));
    Ok(vec![t(&format!("X via pair ({r},{rp})"), q.x(), rhs)])
}

fn cross_reduction(s: &ExtendedSystem) -> Result<Vec<IdentityTerm>, DiffError> {
    let mut v = reduction(s, 1, 2)?;
    let (k, c) = (s.upper.kappa(1), p(s).constant(1, 2)?);
    let expect = k * (k * (s.upper.tau(1) - s.lower.tau(2))).tanh();
    v.push(t("C = k tanh k(tau_1 - tau'_2)", Op::real(c), Op::real(expect)));
    Ok(v)
}

fn y_reduction(s: &ExtendedSystem) -> Result<Vec<IdentityTerm>, DiffError> {
    let q = p(s);
    let (j, jp, ki, _, _) = q.partial_levels()?;
    let yb = breve_y_for_pair(&s.upper, &s.lower, j, jp)?;
    Ok(vec![t("Y", q.y(), q.h(&[ki]).then(&yb))])
}

fn iso_reduction(s: &ExtendedSystem, which: usize) -> Result<Vec<IdentityTerm>, DiffError> {
    let q = p(s);
    let (c1, c2, _, _, hy, hx) = generic_pair(s)?;
    let (k1, k2) = (s.upper.kappa(1).powi(2), s.upper.kappa(2).powi(2));
    let d = c1 - c2;
    Ok(if which == 1 {
        let rhs = q.h(&[(c1 * k2 - c2 * k1) / d]).then(&hx).scale(d).add(&hy.scale((k2 - k1) * c1 * c2));
        vec![t("(C1 - C2) X5", q.x().scale(d), rhs)]
    } else {
        let rhs = hx.scale(k1 - k2).add(&q.h(&[(c1 * k1 - c2 * k2) / d]).then(&hy).scale(d));
        vec![t("(C1 - C2) Y4", q.y().scale(d), rhs)]
    })
}

fn special_reduction(s: &ExtendedSystem) -> Result<Vec<IdentityTerm>, DiffError> {
    let q = p(s);
    let c = q.constant(1, 1)?;
    let xh = hat_x1(&s.upper, &s.lower, c);
    let k2 = q.k2();
    let xa = breve_for_pair(&s.upper, &s.lower, 1, 1)?.op;
    let xb = breve_for_pair(&s.upper, &s.lower, 2, 2)?.op;
    Ok(vec![
        t("Xb^A", xa, q.h(&[k2[1]]).then(&xh)),
        t("Xb^B", xb, q.h(&[k2[0]]).then(&xh)),
        t("X5", q.x(), q.h(&k2).then(&xh).sub(&q.y().scale(c))),
    ])
}

fn x7_reduction(s: &ExtendedSystem) -> Result<Vec<IdentityTerm>, DiffError> {
    let mut v = Vec::new();
    for r in 1..=3 {
        v.extend(reduction(s, r, r)?);
    }
    Ok(v)
}

/// Relations of the reduced first-order operator with the singular
/// factors `B_1 = d/dx - kappa coth kappa(x + tau)`.
fn half_period(s: &ExtendedSystem, which: usize) -> Result<Vec<IdentityTerm>, DiffError> {
    let (k, tu, tl) = (s.upper.kappa(1), s.upper.tau(1), s.lower.tau(1));
    let a = |tau: f64| Op::first_order(1.0, Coeff::seed_log(RealSeed::Cosh, k, tau).scale(-1.0));
    let b = |tau: f64| Op::first_order(1.0, Coeff::seed_log(RealSeed::Sinh, k, tau).scale(-1.0));
    Ok(match which {
        1 => {
            let xr = breve_x1(Seed::sinh(k, tu), Seed::sinh(k, tl))?;
            vec![
                t("Xb B'", xr.op.then(&b(tl)), b(tu).then(&a_c(xr.c))),
                t("B^+ Xb", b(tu).adjoint().then(&xr.op), a_c(xr.c).then(&b(tl).adjoint())),
            ]
        }
        2 => {
            let xr = breve_x1(Seed::sinh(k, tu), Seed::cosh(k, tl))?;
            vec![
                t("Xb A'", xr.op.then(&a(tl)), b(tu).then(&a_c(xr.c))),
                t("B^+ Xb", b(tu).adjoint().then(&xr.op), a_c(xr.c).then(&a(tl).adjoint())),
            ]
        }
        _ => {
            let xr = breve_x1(Seed::cosh(k, tu), Seed::sinh(k, tl))?;
            vec![t("A_C B'^+", a_c(xr.c).then(&b(tl).adjoint()), a(tu).adjoint().then(&xr.op))]
        }
    })
}

// ---------------------------------------------------------------------
// The registry

fn rec(
    id: &str,
    group: &'static str,
    statement: &str,
    canonical: Canonical,
    applies: fn(&ExtendedSystem) -> bool,
    b: impl Fn(&ExtendedSystem) -> Result<Vec<IdentityTerm>, DiffError> + Send + Sync + 'static,
) -> IdentityRecord {
    IdentityRecord {
        id: id.into(),
        group,
        statement: statement.into(),
        canonical,
        conjugate_of: None,
        applies,
        kind: Kind::Operator(Arc::new(b)),
    }
}

/// Hermitian conjugate of every equality of `of`.
fn conjugate(of: &IdentityRecord) -> IdentityRecord {
    let Kind::Operator(inner) = of.kind.clone() else { unreachable!("scalar records have no conjugate") };
    let b: Builder = Arc::new(move |s| {
        Ok(inner(s)?
            .into_iter()
            .map(|t| IdentityTerm { label: format!("({})^+", t.label), lhs: t.lhs.adjoint(), rhs: t.rhs.adjoint() })
            .collect())
    });
    IdentityRecord {
        id: format!("{}_DAG", of.id),
        group: of.group,
        statement: format!("Hermitian conjugate of {}", of.id),
        canonical: of.canonical,
        conjugate_of: Some(of.id.clone()),
        applies: of.applies,
        kind: Kind::Operator(b),
    }
}

const G_ONE_BREAK: &str = "products, n = 1, distinct levels";
const G_ONE_ISO: &str = "products, n = 1, equal levels";
const G_N_BREAK: &str = "products, n solitons, distinct levels";
const G_PARTIAL: &str = "products, n = 2, one shared level";
const G_COMMON_SHIFT: &str = "products, n = 2, one shared level and shift";
const G_COMMON_VIRTUAL: &str = "products, n = 2, common virtual system";
const G_EXACT: &str = "products, n = 2, generic exact isospectrality";
const G_SPECIAL: &str = "products, n = 2, equal shift constants";
const G_REDUCTION: &str = "reductions";
const G_HALF_PERIOD: &str = "half-period relations";
const G_SCALAR: &str = "scalar identities";

fn build_registry() -> Vec<IdentityRecord> {
    use Canonical::*;
    let mut v: Vec<IdentityRecord> = Vec::new();
    let one = [
        "X X^+ = H (H + k^2)(H + k'^2), X^+ X = H' (H' + k^2)(H' + k'^2)",
        "Y Y^+ = (H + k^2)(H + k'^2), Y^+ Y = (H' + k^2)(H' + k'^2)",
        "X Y^+ = -Y X^+ = (H + k'^2) Z, Y^+ X = -X^+ Y = (H' + k^2) Z'",
        "Z X = -H (H + k^2) Y, X Z' = -H (H + k'^2) Y",
        "Z Y = (H + k^2) X, Y Z' = (H + k'^2) X",
        "Z Z^+ = -Z^2 = H (H + k^2)^2, Z' Z'^+ = -Z'^2 = H' (H' + k'^2)^2",
    ];
    for (i, st) in one.iter().enumerate() {
        let line = i + 1;
        v.push(rec(&format!("A1_XX0{line}"), G_ONE_BREAK, st, OneBreak, one_break, move |s| complete_break_products(s, line)));
    }
    let iso = [
        "Xb Xb^+ = H + C^2, Xb^+ Xb = H' + C^2",
        "Xb Y^+ = Z + C (H + k^2), Y Xb^+ = -Z + C (H + k^2)",
        "Z Xb = Xb Z' = C (H + k^2) Xb - (H + C^2) Y",
        "Z Y = Y Z' = (H + k^2)((H + k^2) Xb - C Y)",
    ];
    for (i, st) in iso.iter().enumerate() {
        let line = i + 1;
        v.push(rec(&format!("A1_ISO0{line}"), G_ONE_ISO, st, OneSelfIso, one_self_iso, move |s| self_iso_products(s, line)));
    }
    let nsol = [
        "Y Y^+ = P P', X X^+ = H P P'",
        "X Y^+ = -Y X^+ = P' Z",
        "Z Y = P X, Y Z' = P' X",
        "Z X = -H P Y, X Z' = -H P' Y",
        "Z^2 = -H P^2",
    ];
    for (i, st) in nsol.iter().enumerate() {
        let line = i + 1;
        v.push(rec(&format!("AN_XXYY0{line}"), G_N_BREAK, st, TwoBreak, any_break, move |s| nsoliton_products(s, line)));
    }
    v.push(rec("AN_XXYY_MIRROR", G_N_BREAK, "X^+ = -X(k', t'; k, t), Y^+ = Y(k', t'; k, t), Z^+ = -Z", TwoBreak, any_break, nsoliton_mirror));
    let partial = [
        "Xb Xb^+ = h_C h_d h_d', Y Y^+ = h_i^2 h_d h_d'",
        "Xb Y^+ = h_d' (Z + C h_i h_d), Y Xb^+ = h_d' (-Z + C h_i h_d)",
        "Z Y = h_i h_d (h_i Xb - C Y), Y Z' = h_i h_d' (h_i Xb - C Y)",
        "Z Xb = h_d (C h_i Xb - h_C Y), Xb Z' = h_d' (C h_i Xb - h_C Y)",
    ];
    for (i, st) in partial.iter().enumerate() {
        let line = i + 1;
        v.push(rec(&format!("A2_PART0{line}"), G_PARTIAL, st, Break1, two_partial, move |s| partial_products(s, line)));
    }
    let shift = [
        "Yb Yb^+ = h_d h_d', X X^+ = H h_i^2 h_d h_d'",
        "X Yb^+ = -Yb X^+ = h_d' Z, Yb^+ X = -X^+ Yb = h'_d Z'",
        "Z X = -H h_i^2 h_d Yb, X Z' = -H h_i^2 h_d' Yb",
        "Z Yb = h_d X, Yb Z' = h_d' X",
    ];
    for (i, st) in shift.iter().enumerate() {
        let line = i + 1;
        v.push(rec(&format!("A2_AAA0{line}"), G_COMMON_SHIFT, st, CommonShift, two_common_shift, move |s| common_shift_products(s, line)));
    }
    let virt = [
        "Yb Yb^+ = h_o^2, Yb^+ Yb = h'_o^2, Xb Xb^+ = h_C h_j^2, Xb^+ Xb = h'_C h'_j^2",
        "Xb Yb^+ = Z + C h_1 h_2, Yb Xb^+ = -Z + C h_1 h_2",
        "Xb^+ Yb = -Z' + C h'_1 h'_2, Yb^+ Xb = Z' + C h'_1 h'_2",
        "Z Yb = Yb Z' = h_o^2 Xb - C h_1 h_2 Yb, Yb^+ Z = Z' Yb^+ = C h'_1 h'_2 Yb^+ - h'_o^2 Xb^+",
        "Z Xb = Xb Z' = C h_1 h_2 Xb - h_C h_j^2 Yb, Xb^+ Z = Z' Xb^+ = h'_C h'_j^2 Yb^+ - C h'_1 h'_2 Xb^+",
    ];
    for (i, st) in virt.iter().enumerate() {
        let line = i + 1;
        v.push(rec(&format!("A2_ISO110{line}"), G_COMMON_VIRTUAL, st, CommonVirtual, two_common_virtual, move |s| {
            common_virtual_products(s, line)
        }));
    }
    v.push(rec(
        "A2_XXAB",
        G_EXACT,
        "X(i) X(j)^+ = h_(3-i) h_(3-j) h_ij - (C_i - C_j) Z, X(i)^+ X(j) = h'_(3-i) h'_(3-j) h'_ij + (C_i - C_j) Z'",
        TwoExact,
        two_exact,
        |s| exact_generic_products(s, 1),
    ));
    v.push(rec(
        "A2_ZXAB",
        G_EXACT,
        "Z X(i) = X(i) Z' = -((-1)^i h_1 h_2 h_12 X(i) + e^ij h_ii h_j^2 X(j)) / dC",
        TwoExact,
        two_exact,
        |s| exact_generic_products(s, 2),
    ));
    v.push(rec(
        "A2_ZXAB_ADJ",
        G_EXACT,
        "X(i)^+ Z = Z' X(i)^+ = ((-1)^i h'_1 h'_2 h'_12 X(i)^+ + e^ij h'_ii h'_j^2 X(j)^+) / dC",
        TwoExact,
        two_exact,
        |s| exact_generic_products(s, 3),
    ));
    let special = [
        "Xh Xh^+ = h_C, Xh^+ Xh = h'_C, Y Y^+ = h_1^2 h_2^2, Y^+ Y = h'_1^2 h'_2^2",
        "Xh Y^+ = Z + C h_1 h_2, Y Xh^+ = -Z + C h_1 h_2",
        "Z Xh = Xh Z' = C h_1 h_2 Xh - h_C Y, Xh^+ Z = Z' Xh^+ = h'_C Y^+ - C h'_1 h'_2 Xh^+",
        "Y Z' = Z Y = h_1 h_2 (h_1 h_2 Xh - C Y), Z' Y^+ = Y^+ Z = h'_1 h'_2 (C Y^+ - h'_1 h'_2 Xh^+)",
    ];
    for (i, st) in special.iter().enumerate() {
        let line = i + 1;
        v.push(rec(&format!("A2_SPEC0{line}"), G_SPECIAL, st, TwoSpecial, two_special, move |s| special_products(s, line)));
    }

    v.push(rec("XBR_RED", G_REDUCTION, "X_3 = (H + k^2) Xb_1 - C Y_2", OneSelfIso, one_self_iso, |s| reduction(s, 1, 1)));
    v.push(rec("X5_RED_A", G_REDUCTION, "X_5 = (H + k_1^2) Xb^A - C(k_1, t_1 - t'_1) Y_4", Break1, has_a, |s| reduction(s, 1, 1)));
    v.push(rec("X5_RED_B", G_REDUCTION, "X_5 = (H + k_2^2) Xb^B - C(k_2, t_2 - t'_2) Y_4", Break2, has_b, |s| reduction(s, 2, 2)));
    v.push(rec(
        "X5_RED_AB",
        G_REDUCTION,
        "X_5 = (H + k_1^2) Xb^AB - C Y_4 with C = k_1 tanh k_1(t_1 - t'_2)",
        Break3,
        has_ab,
        cross_reduction,
    ));
    v.push(rec("Y4_RED", G_REDUCTION, "Y_4 = (H + k_i^2) Yb_2", CommonShift, two_common_shift, y_reduction));
    v.push(rec(
        "ISO_RED1",
        G_REDUCTION,
        "(C_1 - C_2) X_5 = ((C_1 - C_2) H + C_1 k_2^2 - C_2 k_1^2) Xh_3 + (k_2^2 - k_1^2) C_1 C_2 Yh_2",
        TwoExact,
        two_exact,
        |s| iso_reduction(s, 1),
    ));
    v.push(rec(
        "ISO_RED2",
        G_REDUCTION,
        "(C_1 - C_2) Y_4 = (k_1^2 - k_2^2) Xh_3 + ((C_1 - C_2) H + C_1 k_1^2 - C_2 k_2^2) Yh_2",
        TwoExact,
        two_exact,
        |s| iso_reduction(s, 2),
    ));
    v.push(rec(
        "XAXB_RED",
        G_REDUCTION,
        "Xb^A = (H + k_2^2) Xh_1, Xb^B = (H + k_1^2) Xh_1, X_5 = h_1 h_2 Xh_1 - C Y_4",
        TwoSpecial,
        two_special,
        special_reduction,
    ));
    v.push(rec("X7_RED", G_REDUCTION, "X_7 = (H + k_r^2) Xb_5^(r) - C_r Y_6, r = 1, 2, 3", ThreeExact, three_exact, x7_reduction));

    v.push(rec(
        "HP_X1B1",
        G_HALF_PERIOD,
        "Xb(t~, t~') B'_1 = B_1 A_C, B_1^+ Xb(t~, t~') = A_C B'_1^+",
        OneSelfIso,
        one_self_iso,
        |s| half_period(s, 1),
    ));
    v.push(rec(
        "HP_X1A1B1",
        G_HALF_PERIOD,
        "Xb(t~, t') A'_1 = B_1 A_C(t~ - t'), B_1^+ Xb(t~, t') = A_C(t~ - t') A'_1^+",
        OneSelfIso,
        one_self_iso,
        |s| half_period(s, 2),
    ));
    v.push(rec(
        "HP_DBA",
        G_HALF_PERIOD,
        "A_C(t - t~') B'_1^+ = A_1^+ Xb(t, t~')",
        OneSelfIso,
        one_self_iso,
        |s| half_period(s, 3),
    ));
    v.push(IdentityRecord {
        id: "TRIG_IDEN".into(),
        group: G_SCALAR,
        statement: "1 - tanh a tanh b - coth(a - b)(tanh a - tanh b) = 0".into(),
        canonical: Angles,
        conjugate_of: None,
        applies: never,
        kind: Kind::Trig,
    });

    // products the text obtains by conjugating others
    for id in ["A1_XX04", "A1_XX05", "A1_ISO03", "A1_ISO04", "AN_XXYY03", "AN_XXYY04"] {
        let of = v.iter().find(|r| r.id == id).expect("registered").clone();
        v.push(conjugate(&of));
    }
    v
}

/// Every registered identity, in a fixed order.
pub fn identity_registry() -> &'static [IdentityRecord] {
    static REGISTRY: OnceLock<Vec<IdentityRecord>> = OnceLock::new();
    REGISTRY.get_or_init(build_registry)
}

pub fn lookup(id: &str) -> Option<&'static IdentityRecord> {
    identity_registry().iter().find(|r| r.id == id)
}

/// Packets and bound states of the upper block plus the bound states of
/// the lower one.
pub fn identity_suite(sys: &ExtendedSystem) -> Vec<TestFunction> {
    let mut v = default_suite(&sys.upper);
    v.extend((1..=sys.lower.n()).map(|j| TestFunction::bound(&sys.lower, j)));
    v
}

/// `count` angle pairs, `|a - b| >= 0.05`, from a fixed seed.
pub fn trig_pairs(count: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let (a, b): (f64, f64) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        if (a - b).abs() >= 0.05 {
            out.push((a, b));
        }
    }
    out
}

pub fn trig_residual(a: f64, b: f64) -> f64 {
    (1.0 - a.tanh() * b.tanh() - (a.tanh() - b.tanh()) / (a - b).tanh()).abs()
}

pub const TRIG_THRESHOLD: f64 = 1e-13;

fn evaluate_terms(id: &str, terms: &[IdentityTerm], sys: &ExtendedSystem, tfs: &[TestFunction]) -> ResidualReport {
    let order = terms.iter().map(|t| t.lhs.order().max(t.rhs.order())).max().unwrap_or(0);
    let thr = default_threshold(order);
    let kmin = sys.kappa_min();
    let half = 8.0 / kmin;
    let reports = terms
        .iter()
        .map(|t| {
            let mut poles = t.lhs.poles(-half, half);
            poles.extend(t.rhs.poles(-half, half));
            let grid = standard_grid(kmin, &poles);
            (t.label.clone(), op_residual(&t.label, &t.lhs, &t.rhs, tfs, &grid, thr))
        })
        .collect();
    merge_reports(id, reports, thr)
}

pub fn evaluate_record(rec: &IdentityRecord, input: IdentityInput, tfs: &[TestFunction]) -> Result<ResidualReport, VerifyError> {
    match (&rec.kind, input) {
        (Kind::Trig, IdentityInput::Angles(pairs)) => {
            let worst = pairs.iter().map(|&(a, b)| trig_residual(a, b)).fold(0.0, f64::max);
            Ok(ResidualReport::scalar(&rec.id, worst, TRIG_THRESHOLD))
        }
        (Kind::Operator(_), IdentityInput::System(sys)) => Ok(evaluate_terms(&rec.id, &rec.terms(sys)?, sys, tfs)),
        (Kind::Trig, _) => Err(rec.not_applicable("needs angle pairs".into())),
        (Kind::Operator(_), _) => Err(rec.not_applicable("needs an operator pair".into())),
    }
}

/// Residual of record `id` for the given parameters.
pub fn evaluate_identity(id: &str, input: IdentityInput, tfs: &[TestFunction]) -> Result<ResidualReport, VerifyError> {
    let rec = lookup(id).ok_or_else(|| VerifyError::UnknownId(id.into()))?;
    evaluate_record(rec, input, tfs)
}

/// Residual of a record at its canonical parameters and default suite.
pub fn evaluate_canonical(rec: &IdentityRecord) -> Result<ResidualReport, VerifyError> {
    match rec.canonical.system() {
        None => evaluate_record(rec, IdentityInput::Angles(&trig_pairs(100, super::suite::DEFAULT_SEED)), &[]),
        Some(sys) => {
            let sys = sys?;
            evaluate_record(rec, IdentityInput::System(&sys), &identity_suite(&sys))
        }
    }
}
