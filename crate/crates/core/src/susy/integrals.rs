use super::classify::{ExtendedSystem, IsoClass, ShiftConstant};
use super::matrix::MatrixOp;
use super::SusyError;
use crate::diffop::{
    breve_for_pair, breve_y_for_pair, effective_order, hat_x1, intertwiner_x, intertwiner_y, isospectral_generators_n2,
    lax_z, IsoGenerators, Op, KAPPA_TOL,
};
use crate::verify::standard_grid;
use num_complex::Complex64;
use serde::Serialize;

/// One irreducible intertwiner `T` with `T H' = H T`.
#[derive(Clone, Debug)]
pub struct Generator {
    pub label: String,
    pub op: Op,
}

/// Matrix integrals of an extended system.
#[derive(Clone, Debug)]
pub struct Integrals {
    /// Irreducible intertwiners; empty for identical blocks.
    pub generators: Vec<Generator>,
    /// Supercharges built from the even-order generator.
    pub q: [MatrixOp; 2],
    /// Supercharges built from the odd-order generator.
    pub s: [MatrixOp; 2],
    /// Lax integrals `-i diag(Z, Z')` and `sigma_3` times it.
    pub p: [MatrixOp; 2],
    /// `F^(1)_a, F^(2)_a` of a generic exactly isospectral two-soliton pair.
    pub f: Option<[[MatrixOp; 2]; 2]>,
}

impl Integrals {
    /// Every constructed integral with a short name.
    pub fn all(&self) -> Vec<(String, &MatrixOp)> {
        let mut v = Vec::new();
        for a in 0..2 {
            v.push((format!("Q{}", a + 1), &self.q[a]));
            v.push((format!("S{}", a + 1), &self.s[a]));
            v.push((format!("P{}", a + 1), &self.p[a]));
        }
        if let Some(f) = &self.f {
            for (i, fi) in f.iter().enumerate() {
                for (a, m) in fi.iter().enumerate() {
                    v.push((format!("F{}_{}", i + 1, a + 1), m));
                }
            }
        }
        v
    }

    pub fn supercharges(&self) -> Vec<(String, &MatrixOp)> {
        self.all().into_iter().filter(|(n, _)| !n.starts_with('P')).collect()
    }
}

fn gen(label: &str, op: Op) -> Generator {
    Generator { label: label.into(), op }
}

fn value(c: &ShiftConstant) -> Result<f64, SusyError> {
    c.value.ok_or_else(|| SusyError::CaseMismatch(format!("shift constant of pair ({}, {}) diverges", c.j, c.jp)))
}

/// Points away from every pole of `op`, used for symbol probes.
fn probe_points(sys: &ExtendedSystem, op: &Op) -> Vec<f64> {
    let half = sys.half_width();
    let grid = standard_grid(sys.kappa_min(), &op.poles(-half, half));
    let p = &grid.points;
    [p.len() / 3, p.len() / 2, 2 * p.len() / 3].iter().map(|&i| p[i.min(p.len() - 1)]).collect()
}

/// Divides `op` by its coefficient of `d^m`, which must be constant.
fn normalize(sys: &ExtendedSystem, op: &Op, m: usize) -> Result<Op, SusyError> {
    let pts = probe_points(sys, op);
    let lead: Vec<Complex64> = pts.iter().map(|&x| Ok(op.symbol(x)?[m])).collect::<Result<_, SusyError>>()?;
    let c = lead[0];
    let spread = lead.iter().map(|l| (l - c).norm()).fold(0.0, f64::max);
    if c.norm() < 1e-8 || spread > 1e-6 * c.norm() {
        return Err(SusyError::CaseMismatch(format!("leading coefficient of order {m} is not a nonzero constant")));
    }
    Ok(op.scale_c(1.0 / c))
}

/// Successive normalized differences of the reduced intertwiners of the
/// coinciding pairs. With `r` pairs the last two levels have orders
/// `2n - r + 1` and `2n - r`.
fn difference_scheme(sys: &ExtendedSystem) -> Result<Vec<Generator>, SusyError> {
    let n = sys.n();
    let mut level: Vec<Op> = Vec::new();
    let mut cs = Vec::new();
    for c in &sys.constants {
        let red = breve_for_pair(&sys.upper, &sys.lower, c.j, c.jp)?;
        cs.push(value(c)?);
        level.push(red.op);
    }
    if cs.windows(2).any(|w| (w[0] - w[1]).abs() <= KAPPA_TOL * w[0].abs().max(1.0)) {
        return Err(SusyError::CaseMismatch("equal shift constants among the coinciding pairs".into()));
    }
    let mut previous = level[0].clone();
    let mut order = 2 * n - 1;
    while level.len() > 1 {
        order -= 1;
        let next = level
            .windows(2)
            .map(|w| normalize(sys, &w[0].sub(&w[1]), order))
            .collect::<Result<Vec<_>, _>>()?;
        previous = level[0].clone();
        level = next;
    }
    let (hi, lo) = (previous, level[0].clone());
    Ok(vec![gen(&format!("T_{}", order + 1), hi), gen(&format!("T_{order}"), lo)])
}

fn generators(sys: &ExtendedSystem) -> Result<(Vec<Generator>, Option<(Op, Op)>), SusyError> {
    let (u, l) = (&sys.upper, &sys.lower);
    let n = sys.n();
    let full = || vec![gen(&format!("Y_{}", 2 * n), intertwiner_y(u, l)), gen(&format!("X_{}", 2 * n + 1), intertwiner_x(u, l))];
    Ok(match &sys.class {
        IsoClass::CompleteBreak => (full(), None),
        IsoClass::Identical => (Vec::new(), None),
        IsoClass::PartialSameLevel { .. } | IsoClass::PartialCrossLevel { .. } => {
            let c = &sys.constants[0];
            match c.value {
                Some(_) => {
                    let red = breve_for_pair(u, l, c.j, c.jp)?;
                    (vec![gen(&format!("Y_{}", 2 * n), intertwiner_y(u, l)), gen(&format!("Xbr_{}", 2 * n - 1), red.op)], None)
                }
                None => {
                    let y = breve_y_for_pair(u, l, c.j, c.jp)?;
                    (vec![gen(&format!("Ybr_{}", 2 * n - 2), y), gen(&format!("X_{}", 2 * n + 1), intertwiner_x(u, l))], None)
                }
            }
        }
        IsoClass::ExactCommonVirtual { j } => {
            if n != 2 {
                return Err(SusyError::CaseMismatch("common virtual system is built for n = 2 only".into()));
            }
            let o = 3 - j;
            let y = breve_y_for_pair(u, l, *j, *j)?;
            let x = breve_for_pair(u, l, o, o)?;
            (vec![gen("Ybr_2", y), gen("Xbr_3", x.op)], None)
        }
        IsoClass::SpecialCequal => {
            let c = value(&sys.constants[0])?;
            (vec![gen(&format!("Y_{}", 2 * n), intertwiner_y(u, l)), gen("Xhat_1", hat_x1(u, l, c))], None)
        }
        IsoClass::ExactGeneric if n == 2 => match isospectral_generators_n2(u, l, KAPPA_TOL)? {
            IsoGenerators::Generic { hat_y2, hat_x3, x3a, x3b, .. } => {
                (vec![gen("Yhat_2", hat_y2), gen("Xhat_3", hat_x3)], Some((x3a, x3b)))
            }
            IsoGenerators::Special { .. } => return Err(SusyError::CaseMismatch("shift constants coincide".into())),
        },
        IsoClass::ExactGeneric | IsoClass::PartialMulti { .. } => (difference_scheme(sys)?, None),
    })
}

/// Supercharges, Lax integrals and (for the generic two-soliton exact
/// case) the `F` combinations of the classified system.
pub fn build_integrals(sys: &ExtendedSystem) -> Result<Integrals, SusyError> {
    let (gens, f_pair) = generators(sys)?;
    let minus_i = Complex64::new(0.0, -1.0);
    let p1 = MatrixOp::diag(lax_z(&sys.upper), lax_z(&sys.lower)).scale_c(minus_i);
    let p2 = MatrixOp::sigma3().mul(&p1);
    let (q, s) = if gens.is_empty() {
        (MatrixOp::graded_pair(MatrixOp::sigma1()), MatrixOp::graded_pair(MatrixOp::sigma1()))
    } else {
        let even = gens.iter().find(|g| g.op.order() % 2 == 0).or_else(|| gens.first()).expect("generator");
        let odd = gens.iter().find(|g| g.op.order() % 2 == 1).or_else(|| gens.last()).expect("generator");
        (
            MatrixOp::graded_pair(MatrixOp::supercharge(&even.op)),
            MatrixOp::graded_pair(MatrixOp::supercharge(&odd.op)),
        )
    };
    let f = f_pair.map(|(a, b)| [MatrixOp::graded_pair(MatrixOp::supercharge(&a)), MatrixOp::graded_pair(MatrixOp::supercharge(&b))]);
    Ok(Integrals { generators: gens, q, s, p: [p1, p2], f })
}

/// Total order of the irreducible intertwiners against `4n + 1 - 2r`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderLedger {
    pub n: usize,
    pub r: usize,
    pub expected: usize,
    /// `(label, nominal order, effective order)` per generator.
    pub orders: Vec<(String, usize, usize)>,
    pub total: usize,
    pub pass: bool,
}

pub fn order_ledger(sys: &ExtendedSystem, ints: &Integrals) -> Result<OrderLedger, SusyError> {
    if sys.class == IsoClass::Identical {
        return Err(SusyError::CaseMismatch("identical blocks have no intertwiners".into()));
    }
    let (n, r) = (sys.n(), sys.coincidences());
    let mut orders = Vec::new();
    for g in &ints.generators {
        let eff = effective_order(&g.op, &probe_points(sys, &g.op), 1e-9)?;
        orders.push((g.label.clone(), g.op.order(), eff));
    }
    let total = orders.iter().map(|o| o.2).sum();
    let expected = 4 * n + 1 - 2 * r;
    Ok(OrderLedger { n, r, expected, orders, total, pass: total == expected })
}
