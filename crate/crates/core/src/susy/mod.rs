//! The extended system `diag(H_n, H_n')`: classification by the pattern of
//! coinciding levels, its supercharges and Lax integrals, and residuals of
//! the superalgebra they close.

mod classify;
mod integrals;
mod matrix;
mod relations;

pub use classify::{classify, coinciding_pairs, ExtendedSystem, IsoClass, ShiftConstant};
pub use integrals::{build_integrals, order_ledger, Generator, Integrals, OrderLedger};
pub use matrix::{MatrixOp, Parity};
pub use relations::{
    default_threshold, invariant_reports, matrix_residual, merge_reports, referenced_residual, relation_report, relation_residual, relations,
    Relation, Term,
};

use crate::diffop::{compose_a, DiffError, Op};
use crate::verify::{standard_grid, ResidualReport, TestPair};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SusyError {
    #[error("blocks have different sizes {0} and {1}")]
    UnequalSizes(usize, usize),
    #[error("kappa_{j} and kappa'_{jp} differ by {diff:e}, too close to call")]
    AmbiguousWithinTolerance { j: usize, jp: usize, diff: f64 },
    #[error("parameters do not fit this construction: {0}")]
    CaseMismatch(String),
    #[error("relation not applicable: {0}")]
    RelationNotApplicable(String),
    #[error(transparent)]
    Diff(#[from] DiffError),
}

/// How far `P_1` is from commuting with the supercharges.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CentralCharge {
    /// Relative residual of `P_1 G = G P_1`, maximized over supercharges `G`.
    pub report: ResidualReport,
    /// `max |[P_1, G] f| / max |f|` over supercharges and test functions.
    pub absolute: f64,
}

fn abs_commutator(p: &MatrixOp, g: &MatrixOp, sys: &ExtendedSystem, fns: &[TestPair]) -> f64 {
    let c = MatrixOp::commutator(p, g);
    let half = sys.half_width();
    let grid = standard_grid(sys.kappa_min(), &c.poles(-half, half));
    let order = c.order();
    let mut worst = 0.0f64;
    for tf in fns {
        let mut cmax = 0.0f64;
        let mut fmax = 0.0f64;
        for &x in &grid.points {
            if let Ok(f) = tf.jets(x, order) {
                fmax = f.iter().map(|j| j.value().norm()).fold(fmax, f64::max);
                if let Ok(v) = c.apply_jets(&f) {
                    cmax = v.iter().map(|z| z.norm()).fold(cmax, f64::max);
                }
            }
        }
        if fmax > 0.0 {
            worst = worst.max(cmax / fmax);
        }
    }
    worst
}

/// `[P_1, G]` for every supercharge `G`. For exactly isospectral classes it
/// vanishes; otherwise the report measures the non-central part.
pub fn central_charge_residual(sys: &ExtendedSystem, ints: &Integrals, fns: &[TestPair]) -> CentralCharge {
    let p1 = &ints.p[0];
    let mut reports = Vec::new();
    let mut absolute = 0.0f64;
    let thr = default_threshold(p1.order() + ints.supercharges().iter().map(|(_, g)| g.order()).max().unwrap_or(0));
    for (name, g) in ints.supercharges() {
        reports.push((name.clone(), matrix_residual(&name, &p1.mul(g), &g.mul(p1), sys, fns, thr)));
        absolute = absolute.max(abs_commutator(p1, g, sys, fns));
    }
    CentralCharge { report: merge_reports("CENTRAL_CHARGE", reports, thr), absolute }
}

/// Least-squares `mu` in `[P_1, Q_1] = -i mu S_1` for a one-soliton pair
/// with distinct kappas, with the relative misfit of that form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NoncentralFit {
    pub mu: f64,
    pub misfit: f64,
}

pub fn noncentral_coefficient(sys: &ExtendedSystem, ints: &Integrals, fns: &[TestPair]) -> Result<NoncentralFit, SusyError> {
    if sys.n() != 1 || sys.class != IsoClass::CompleteBreak {
        return Err(SusyError::RelationNotApplicable("the scalar coefficient needs n = 1 with distinct kappas".into()));
    }
    let c = MatrixOp::commutator(&ints.p[0], &ints.q[0]);
    let s = ints.s[0].scale_c(Complex64::new(0.0, -1.0));
    let half = sys.half_width();
    let mut poles = c.poles(-half, half);
    poles.extend(s.poles(-half, half));
    let grid = standard_grid(sys.kappa_min(), &poles);
    let order = c.order().max(s.order());
    let (mut num, mut den) = (Complex64::new(0.0, 0.0), 0.0);
    let mut pairs = Vec::new();
    for tf in fns {
        for &x in &grid.points {
            let f = tf.jets(x, order)?;
            let (l, r) = (c.apply_jets(&f)?, s.apply_jets(&f)?);
            for k in 0..2 {
                num += r[k].conj() * l[k];
                den += r[k].norm_sqr();
                pairs.push((l[k], r[k]));
            }
        }
    }
    let mu = (num / den).re;
    let scale = pairs.iter().map(|(l, _)| l.norm()).fold(0.0, f64::max).max(1e-300);
    let misfit = pairs.iter().map(|(l, r)| (l - r * mu).norm()).fold(0.0, f64::max) / scale;
    Ok(NoncentralFit { mu, misfit })
}

/// Free integrals of `diag(H_0, H_0)` and the dressed integral each maps to.
pub fn dressing_check(sys: &ExtendedSystem, ints: &Integrals, fns: &[TestPair]) -> Result<ResidualReport, SusyError> {
    if sys.class != IsoClass::CompleteBreak {
        return Err(SusyError::RelationNotApplicable("dressing applies to distinct kappas".into()));
    }
    let dress = MatrixOp::diag(compose_a(&sys.upper), compose_a(&sys.lower));
    let dress_adj = dress.adjoint();
    let p = Op::d().scale_c(Complex64::new(0.0, -1.0));
    let free_p = MatrixOp::diag(p.clone(), p);
    let cases: Vec<(&str, MatrixOp, MatrixOp)> = vec![
        ("sigma_1", MatrixOp::sigma1(), ints.q[0].clone()),
        ("sigma_2", MatrixOp::sigma2(), ints.q[1].scale(-1.0)),
        ("sigma_2 p", MatrixOp::sigma2().mul(&free_p), ints.s[0].scale(-1.0)),
        ("-sigma_1 p", MatrixOp::sigma1().mul(&free_p).scale(-1.0), ints.s[1].clone()),
        ("p", free_p.clone(), ints.p[0].clone()),
        ("sigma_3 p", MatrixOp::sigma3().mul(&free_p), ints.p[1].clone()),
    ];
    let mut reports = Vec::new();
    let mut order = 0;
    for (name, free, target) in cases {
        let dressed = dress.mul(&free).mul(&dress_adj);
        order = order.max(dressed.order());
        let thr = default_threshold(dressed.order());
        reports.push((name.to_string(), matrix_residual(name, &dressed, &target, sys, fns, thr)));
    }
    Ok(merge_reports("DRESSING", reports, default_threshold(order)))
}
