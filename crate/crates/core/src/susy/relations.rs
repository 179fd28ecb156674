use super::classify::{ExtendedSystem, IsoClass};
use super::integrals::Integrals;
use super::matrix::MatrixOp;
use super::SusyError;
use crate::diffop::Op;
use crate::verify::{evaluate_samples, standard_grid, FunctionResidual, ResidualReport, Sample, TestPair};
use num_complex::Complex64;

/// One instance of a relation, e.g. a fixed pair of indices `(a, b)`.
#[derive(Clone, Debug)]
pub struct Term {
    pub label: String,
    pub lhs: MatrixOp,
    pub rhs: MatrixOp,
    /// One product of the (anti)commutator; sets the scale when both sides
    /// vanish identically.
    pub reference: Option<MatrixOp>,
}

/// A named superalgebra relation and its instances.
#[derive(Clone, Debug)]
pub struct Relation {
    pub id: String,
    pub statement: &'static str,
    pub terms: Vec<Term>,
}

impl Relation {
    pub fn order(&self) -> usize {
        self.terms.iter().map(|t| t.lhs.order().max(t.rhs.order())).max().unwrap_or(0)
    }

    /// `1e-8`, or `1e-7` from differential order 7 on.
    pub fn threshold(&self) -> f64 {
        default_threshold(self.order())
    }
}

pub fn default_threshold(order: usize) -> f64 {
    if order >= 7 {
        1e-7
    } else {
        1e-8
    }
}

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn delta(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

/// `epsilon_{ab}` with `epsilon_{12} = 1` (indices from 0).
fn eps(a: usize, b: usize) -> f64 {
    match (a, b) {
        (0, 1) => 1.0,
        (1, 0) => -1.0,
        _ => 0.0,
    }
}

struct Ctx<'a> {
    sys: &'a ExtendedSystem,
}

impl Ctx<'_> {
    /// `diag(prod (H + su), prod (H' + sl))`.
    fn poly(&self, su: &[f64], sl: &[f64]) -> MatrixOp {
        MatrixOp::diag(Op::poly_h(&self.sys.upper_chain, su), Op::poly_h(&self.sys.lower_chain, sl))
    }

    fn h(&self, shifts: &[f64]) -> MatrixOp {
        self.poly(shifts, shifts)
    }
}

fn squares(v: &[f64]) -> Vec<f64> {
    v.iter().map(|k| k * k).collect()
}

fn cat(parts: &[&[f64]]) -> Vec<f64> {
    parts.concat()
}

fn term(label: String, lhs: MatrixOp, rhs: MatrixOp, reference: MatrixOp) -> Term {
    Term { label, lhs, rhs, reference: Some(reference) }
}

/// `{X_a, Y_b} = 2 delta_ab sym + 2 eps_ab anti` for all `a, b`.
fn anti_terms(name: &str, x: &[MatrixOp; 2], y: &[MatrixOp; 2], sym: &MatrixOp, anti: &MatrixOp) -> Vec<Term> {
    let mut v = Vec::new();
    for a in 0..2 {
        for b in 0..2 {
            let rhs = sym.scale(2.0 * delta(a, b)).add(&anti.scale(2.0 * eps(a, b)));
            v.push(term(format!("{name}[{},{}]", a + 1, b + 1), MatrixOp::anticommutator(&x[a], &y[b]), rhs, x[a].mul(&y[b])));
        }
    }
    v
}

/// `[P, X_a] = rhs(a)` for both `a`.
fn comm_terms<F: Fn(usize) -> MatrixOp>(name: &str, p: &MatrixOp, x: &[MatrixOp; 2], rhs: F) -> Vec<Term> {
    (0..2).map(|a| term(format!("{name}[{}]", a + 1), MatrixOp::commutator(p, &x[a]), rhs(a), p.mul(&x[a]))).collect()
}

fn relation(id: &str, statement: &'static str, terms: Vec<Term>) -> Relation {
    Relation { id: id.into(), statement, terms }
}

fn complete_break(ctx: &Ctx, ints: &Integrals) -> Vec<Relation> {
    let sys = ctx.sys;
    let n = sys.n();
    let (k2, kp2) = (squares(sys.upper.kappas()), squares(sys.lower.kappas()));
    let ids: [&str; 4] = if n == 1 {
        ["REL_S1S1", "REL_Q1S", "REL_P11QS", "REL_P12QS"]
    } else {
        ["REL_QnQn", "REL_QnS", "REL_Pn1QS", "REL_Pn2QS"]
    };
    let (q, s, p) = (&ints.q, &ints.s, &ints.p);
    let zero = MatrixOp::zero();
    let mut qq = anti_terms("QQ", q, q, &ctx.h(&cat(&[&k2, &kp2])), &zero);
    qq.extend(anti_terms("SS", s, s, &ctx.h(&cat(&[&[0.0], &k2, &kp2])), &zero));
    let sq = anti_terms("SQ", s, q, &zero, &ctx.poly(&kp2, &k2).mul(&p[0]));
    let minus = ctx.h(&k2).sub(&ctx.h(&kp2));
    let plus = ctx.h(&k2).add(&ctx.h(&kp2));
    let hm = ctx.h(&[0.0]);
    let mut p1 = comm_terms("P1S", &p[0], s, |a| hm.mul(&minus).mul(&q[a]).scale_c(I));
    p1.extend(comm_terms("P1Q", &p[0], q, |a| minus.mul(&s[a]).scale_c(-I)));
    let mut p2 = comm_terms("P2S", &p[1], s, |a| hm.mul(&plus).mul(&q[a]).scale_c(I));
    p2.extend(comm_terms("P2Q", &p[1], q, |a| plus.mul(&s[a]).scale_c(-I)));
    vec![
        relation(ids[0], "{Q_a,Q_b} = 2d_ab P(H,k)P(H,k'), {S_a,S_b} = 2d_ab H P(H,k)P(H,k')", qq),
        relation(ids[1], "{S_a,Q_b} = 2e_ab P(H,K) P_1", sq),
        relation(ids[2], "[P_1,S_a] = i H P^-(H) Q_a, [P_1,Q_a] = -i P^-(H) S_a", p1),
        relation(ids[3], "[P_2,S_a] = i H P^+(H) Q_a, [P_2,Q_a] = -i P^+(H) S_a", p2),
    ]
}

/// Shared shape of the self-isospectral, special-family and common-virtual
/// algebras: `{S,S} = 2d hss`, `{Q,Q} = 2d hqq`, `{S_a,Q_b} = 2d c hsq +
/// 2e P_1`, `[P_2,S_a] = 2i (u Q_a - c v S_a)`, `[P_2,Q_a] = 2i w (c v' Q_a - w S_a)`.
struct BreveShape {
    c: f64,
    hss: MatrixOp,
    hqq: MatrixOp,
    hsq: MatrixOp,
    ps_q: MatrixOp,
    ps_s: MatrixOp,
    pq_outer: MatrixOp,
    pq_q: MatrixOp,
    pq_s: MatrixOp,
}

fn breve_relations(ids: [&str; 3], shape: BreveShape, ints: &Integrals) -> Vec<Relation> {
    let (q, s, p) = (&ints.q, &ints.s, &ints.p);
    let zero = MatrixOp::zero();
    let mut ss = anti_terms("SS", s, s, &shape.hss, &zero);
    ss.extend(anti_terms("QQ", q, q, &shape.hqq, &zero));
    let sq = anti_terms("SQ", s, q, &shape.hsq.scale(shape.c), &p[0]);
    let c = shape.c;
    let mut ps = comm_terms("P2S", &p[1], s, |a| {
        shape.ps_q.mul(&q[a]).sub(&shape.ps_s.mul(&s[a]).scale(c)).scale_c(2.0 * I)
    });
    ps.extend(comm_terms("P2Q", &p[1], q, |a| {
        shape.pq_outer.mul(&shape.pq_q.mul(&q[a]).scale(c).sub(&shape.pq_s.mul(&s[a]))).scale_c(2.0 * I)
    }));
    vec![
        relation(ids[0], "{S_a,S_b} and {Q_a,Q_b} diagonal in a, b", ss),
        relation(ids[1], "{S_a,Q_b} = 2d_ab C h + 2e_ab P_1", sq),
        relation(ids[2], "[P_2,S_a] and [P_2,Q_a] close on S_a, Q_a", ps),
    ]
}

fn special(ctx: &Ctx, ints: &Integrals, c: f64) -> Vec<Relation> {
    let n = ctx.sys.n();
    let k2 = squares(ctx.sys.upper.kappas());
    let ids = match n {
        1 => ["REL_SSbreve", "REL_QSbreve", "REL_PSQbreve"],
        2 => ["REL_susyn2spec1", "REL_susyn2spec2", "REL_susyn2spec3"],
        _ => ["REL_SPECIAL_SS", "REL_SPECIAL_SQ", "REL_SPECIAL_PS"],
    };
    let hk = ctx.h(&k2);
    let hc = ctx.h(&[c * c]);
    let shape = BreveShape {
        c,
        hss: hc.clone(),
        hqq: ctx.h(&cat(&[&k2, &k2])),
        hsq: hk.clone(),
        ps_q: hc,
        ps_s: hk.clone(),
        pq_outer: hk.clone(),
        pq_q: MatrixOp::identity(),
        pq_s: hk,
    };
    breve_relations(ids, shape, ints)
}

fn common_virtual(ctx: &Ctx, ints: &Integrals, t: usize, c: f64) -> Vec<Relation> {
    let sys = ctx.sys;
    let o = 3 - t;
    let (kt, ko) = (sys.upper.kappa(t).powi(2), sys.upper.kappa(o).powi(2));
    let (ht, ho) = (ctx.h(&[kt]), ctx.h(&[ko]));
    let shape = BreveShape {
        c,
        hss: ctx.h(&[c * c, kt, kt]),
        hqq: ctx.h(&[ko, ko]),
        hsq: ctx.h(&[kt, ko]),
        ps_q: ht.mul(&ctx.h(&[c * c, kt])),
        ps_s: ht.mul(&ho),
        pq_outer: ho.clone(),
        pq_q: ht,
        pq_s: ho,
    };
    breve_relations(["REL_susyn21101", "REL_susyn21102", "REL_susyn21103"], shape, ints)
}

/// Levels `(i, d, d')`: the coinciding kappa and the two others.
fn partial_levels(sys: &ExtendedSystem) -> (f64, f64, f64) {
    let c = &sys.constants[0];
    let (d, dp) = (3 - c.j, 3 - c.jp);
    (c.kappa.powi(2), sys.upper.kappa(d).powi(2), sys.lower.kappa(dp).powi(2))
}

fn partial_breve(ctx: &Ctx, ints: &Integrals, c: f64) -> Vec<Relation> {
    let (ki, kd, kdp) = partial_levels(ctx.sys);
    let (q, s, p) = (&ints.q, &ints.s, &ints.p);
    let zero = MatrixOp::zero();
    let hi = ctx.h(&[ki]);
    let hc = ctx.h(&[c * c]);
    let mut ss = anti_terms("SS", s, s, &ctx.h(&[kd, kdp, c * c]), &zero);
    ss.extend(anti_terms("QQ", q, q, &ctx.h(&[ki, ki, kd, kdp]), &zero));
    let sq = anti_terms("SQ", s, q, &ctx.h(&[ki, kd, kdp]).scale(c), &ctx.poly(&[kdp], &[kd]).mul(&p[0]));
    let on_s = |a: usize| hc.mul(&q[a]).sub(&hi.mul(&s[a]).scale(c));
    let on_q = |a: usize| hi.mul(&q[a].scale(c).sub(&hi.mul(&s[a])));
    let gap = kd - kdp;
    let mut p1 = comm_terms("P1S", &p[0], s, |a| on_s(a).scale_c(I * gap));
    p1.extend(comm_terms("P1Q", &p[0], q, |a| on_q(a).scale_c(I * gap)));
    let hsum = ctx.h(&[kd]).add(&ctx.h(&[kdp]));
    let mut p2 = comm_terms("P2S", &p[1], s, |a| hsum.mul(&on_s(a)).scale_c(I));
    p2.extend(comm_terms("P2Q", &p[1], q, |a| hsum.mul(&on_q(a)).scale_c(I)));
    vec![
        relation("REL_n2SSp", "{S_a,S_b} = 2d h_d h_d' h_C, {Q_a,Q_b} = 2d h_i^2 h_d h_d'", ss),
        relation("REL_n2SQp", "{S_a,Q_b} = 2d C h_i h_d h_d' + 2e h_(d',d) P_1", sq),
        relation("REL_n2SP1p", "[P_1,S_a], [P_1,Q_a] proportional to k_d^2 - k_d'^2", p1),
        relation("REL_n2SP2p", "[P_2,S_a], [P_2,Q_a] with factor h_d + h_d'", p2),
    ]
}

fn partial_common(ctx: &Ctx, ints: &Integrals) -> Vec<Relation> {
    let (ki, kd, kdp) = partial_levels(ctx.sys);
    let (q, s, p) = (&ints.q, &ints.s, &ints.p);
    let zero = MatrixOp::zero();
    let mut ss = anti_terms("SS", s, s, &ctx.h(&[0.0, ki, ki, kd, kdp]), &zero);
    ss.extend(anti_terms("QQ", q, q, &ctx.h(&[kd, kdp]), &zero));
    let sq = anti_terms("SQ", s, q, &zero, &ctx.poly(&[kdp], &[kd]).mul(&p[0]));
    let hhi = ctx.h(&[0.0, ki, ki]);
    let gap = kd - kdp;
    let mut p1 = comm_terms("P1S", &p[0], s, |a| hhi.mul(&q[a]).scale_c(I * gap));
    p1.extend(comm_terms("P1Q", &p[0], q, |a| s[a].scale_c(-I * gap)));
    let hsum = ctx.h(&[kd]).add(&ctx.h(&[kdp]));
    let mut p2 = comm_terms("P2S", &p[1], s, |a| hhi.mul(&hsum).mul(&q[a]).scale_c(I));
    p2.extend(comm_terms("P2Q", &p[1], q, |a| hsum.mul(&s[a]).scale_c(-I)));
    vec![
        relation("REL_PaBrt1", "{S_a,S_b} = 2d H h_i^2 h_d h_d', {Q_a,Q_b} = 2d h_d h_d'", ss),
        relation("REL_PaBRt3", "{S_a,Q_b} = 2e h_(d',d) P_1", sq),
        relation("REL_PaBRt4", "[P_1,S_a], [P_1,Q_a] proportional to k_d^2 - k_d'^2", p1),
        relation("REL_PaBRt5", "[P_2,S_a], [P_2,Q_a] with factor h_d + h_d'", p2),
    ]
}

fn exact_generic(ctx: &Ctx, ints: &Integrals, c1: f64, c2: f64) -> Result<Vec<Relation>, SusyError> {
    let f = ints.f.as_ref().ok_or_else(|| SusyError::RelationNotApplicable("no F supercharges".into()))?;
    let sys = ctx.sys;
    let k = squares(sys.upper.kappas());
    let cs = [c1, c2];
    let dc = c2 - c1;
    let mut ff = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            let sym = ctx.h(&[cs[i] * cs[j], k[1 - i], k[1 - j]]);
            let anti = ints.p[0].scale(dc * eps(i, j));
            for t in anti_terms(&format!("F{}F{}", i + 1, j + 1), &f[i], &f[j], &sym, &anti) {
                ff.push(t);
            }
        }
    }
    let mut pf = Vec::new();
    for j in 0..2 {
        let kk = 1 - j;
        let sign = if j == 0 { -1.0 } else { 1.0 };
        let own = ctx.h(&[k[0], k[1], c1 * c2]).scale(sign);
        let other = ctx.h(&[cs[j] * cs[j], k[kk], k[kk]]).scale(eps(j, kk));
        pf.extend(comm_terms(&format!("P2F{}", j + 1), &ints.p[1], &f[j], |a| {
            own.mul(&f[j][a]).add(&other.mul(&f[kk][a])).scale_c(2.0 * I / dc)
        }));
    }
    Ok(vec![
        relation("REL_FF", "{F^i_a,F^j_b} = 2d_ab h_ij h_i h_j + 2e_ab e^ij dC P_1", ff),
        relation("REL_PF", "[P_2,F^j_a] = (2i/dC)((-1)^j h_1 h_2 h_12 F^j_a + e^jk h_jj h_k^2 F^k_a)", pf),
    ])
}

/// Every superalgebra relation applicable to the system's class.
pub fn relations(sys: &ExtendedSystem, ints: &Integrals) -> Result<Vec<Relation>, SusyError> {
    let ctx = Ctx { sys };
    let n = sys.n();
    let c0 = sys.constants.first().and_then(|c| c.value);
    Ok(match &sys.class {
        IsoClass::CompleteBreak => complete_break(&ctx, ints),
        IsoClass::SpecialCequal => special(&ctx, ints, c0.expect("special family has finite C")),
        IsoClass::ExactCommonVirtual { j } if n == 2 => {
            let c = sys.constants[2 - j].value.expect("other pair has finite C");
            common_virtual(&ctx, ints, *j, c)
        }
        IsoClass::PartialSameLevel { .. } | IsoClass::PartialCrossLevel { .. } if n == 2 => match c0 {
            Some(c) => partial_breve(&ctx, ints, c),
            None => partial_common(&ctx, ints),
        },
        IsoClass::ExactGeneric if n == 2 => {
            let (c1, c2) = (sys.constants[0].value.unwrap_or(0.0), sys.constants[1].value.unwrap_or(0.0));
            exact_generic(&ctx, ints, c1, c2)?
        }
        _ => Vec::new(),
    })
}

/// Residual of `lhs = rhs` as actions on two-component test functions.
pub fn matrix_residual(
    id: &str,
    lhs: &MatrixOp,
    rhs: &MatrixOp,
    sys: &ExtendedSystem,
    fns: &[TestPair],
    threshold: f64,
) -> ResidualReport {
    referenced_residual(id, lhs, rhs, None, sys, fns, threshold)
}

/// [`matrix_residual`] with a reference operator setting the scale floor.
pub fn referenced_residual(
    id: &str,
    lhs: &MatrixOp,
    rhs: &MatrixOp,
    reference: Option<&MatrixOp>,
    sys: &ExtendedSystem,
    fns: &[TestPair],
    threshold: f64,
) -> ResidualReport {
    let half = sys.half_width();
    let mut poles = lhs.poles(-half, half);
    poles.extend(rhs.poles(-half, half));
    let grid = standard_grid(sys.kappa_min(), &poles);
    let order = lhs.order().max(rhs.order()).max(reference.map_or(0, MatrixOp::order));
    evaluate_samples(id, fns, &grid, threshold, |tf, x| {
        let f = tf.jets(x, order)?;
        let l = lhs.apply_jets(&f)?;
        let r = rhs.apply_jets(&f)?;
        let f_abs = f.iter().map(|j| j.value().norm()).fold(0.0, f64::max);
        let reference = match reference {
            Some(t) => t.apply_jets(&f)?.iter().map(|z| z.norm()).fold(0.0, f64::max),
            None => 0.0,
        };
        Ok(Sample { lhs: l.to_vec(), rhs: r.to_vec(), f_abs, reference })
    })
}

/// Merges per-term reports into one report for `id`.
pub fn merge_reports(id: &str, reports: Vec<(String, ResidualReport)>, threshold: f64) -> ResidualReport {
    let mut per = Vec::new();
    let mut skipped = Vec::new();
    for (label, r) in reports {
        per.extend(r.per_function.into_iter().map(|f| FunctionResidual { function: format!("{label} {}", f.function), ..f }));
        skipped.extend(r.skipped);
    }
    ResidualReport::from_parts(id, per, skipped, threshold)
}

pub fn relation_report(rel: &Relation, sys: &ExtendedSystem, fns: &[TestPair]) -> ResidualReport {
    let thr = rel.threshold();
    let reports = rel.terms.iter().map(|t| (t.label.clone(), referenced_residual(&t.label, &t.lhs, &t.rhs, t.reference.as_ref(), sys, fns, thr))).collect();
    merge_reports(&rel.id, reports, thr)
}

pub fn relation_residual(id: &str, sys: &ExtendedSystem, ints: &Integrals, fns: &[TestPair]) -> Result<ResidualReport, SusyError> {
    let rels = relations(sys, ints)?;
    let rel = rels
        .iter()
        .find(|r| r.id == id)
        .ok_or_else(|| SusyError::RelationNotApplicable(format!("{id} for class {}", sys.class.tag())))?;
    Ok(relation_report(rel, sys, fns))
}

/// Grading, conservation and anticommutator symmetry of every integral.
pub fn invariant_reports(sys: &ExtendedSystem, ints: &Integrals, fns: &[TestPair]) -> Vec<ResidualReport> {
    let s3 = MatrixOp::sigma3();
    let ham = Ctx { sys }.h(&[0.0]);
    let mut grading = Vec::new();
    let mut conservation = Vec::new();
    for (name, g) in ints.all() {
        let (l, r) = if name.starts_with('P') {
            (s3.mul(g), g.mul(&s3))
        } else {
            (s3.mul(g), g.mul(&s3).scale(-1.0))
        };
        grading.push((name.clone(), matrix_residual(&name, &l, &r, sys, fns, 1e-12)));
        let thr = default_threshold(g.order() + 2);
        conservation.push((name.clone(), matrix_residual(&name, &ham.mul(g), &g.mul(&ham), sys, fns, thr)));
    }
    let mut symmetry = Vec::new();
    for a in 0..2 {
        for b in 0..2 {
            let l = MatrixOp::anticommutator(&ints.q[a], &ints.q[b]);
            let r = MatrixOp::anticommutator(&ints.q[b], &ints.q[a]);
            let label = format!("QQ[{},{}]", a + 1, b + 1);
            symmetry.push((label.clone(), matrix_residual(&label, &l, &r, sys, fns, 1e-12)));
        }
    }
    let max_order = ints.all().iter().map(|(_, g)| g.order()).max().unwrap_or(0);
    vec![
        merge_reports("GRADING", grading, 1e-12),
        merge_reports("CONSERVATION", conservation, default_threshold(max_order + 2)),
        merge_reports("ANTICOMMUTATOR_SYMMETRY", symmetry, 1e-12),
    ]
}
