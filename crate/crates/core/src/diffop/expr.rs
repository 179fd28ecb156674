use super::coeff::{chain_poles, Coeff};
use super::DiffError;
use crate::numkern::Jet;
use crate::soliton::Chain;
use num_complex::Complex64;
use std::fmt;
use std::sync::Arc;

#[derive(Clone)]
pub enum Node {
    /// `sign d/dx + f`, with `sign` either `+1` or `-1`.
    FirstOrder { sign: f64, coeff: Coeff },
    Derivative,
    /// Multiplication by a function.
    Multiply(Coeff),
    Scalar(Complex64),
    /// `prod_i (H + shift_i)` with `H` the Hamiltonian of `chain`.
    PolyInH { chain: Arc<Chain>, shifts: Vec<f64> },
    Sum(Vec<Op>),
    /// Ordered product; the rightmost factor acts first.
    Product(Vec<Op>),
    Adjoint(Op),
}

/// Immutable differential operator expression.
#[derive(Clone)]
pub struct Op {
    node: Arc<Node>,
    order: usize,
}

impl fmt::Debug for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.node {
            Node::FirstOrder { sign, coeff } => write!(f, "({}D + {:?})", if *sign > 0.0 { "" } else { "-" }, coeff),
            Node::Derivative => f.write_str("D"),
            Node::Multiply(c) => write!(f, "{c:?}"),
            Node::Scalar(c) => write!(f, "{c}"),
            Node::PolyInH { shifts, .. } => write!(f, "P_H{shifts:?}"),
            Node::Sum(ch) => f.debug_tuple("Sum").field(ch).finish(),
            Node::Product(ch) => f.debug_tuple("Product").field(ch).finish(),
            Node::Adjoint(c) => write!(f, "{c:?}^+"),
        }
    }
}

impl Op {
    fn new(node: Node) -> Op {
        let order = match &node {
            Node::FirstOrder { .. } | Node::Derivative => 1,
            Node::Multiply(_) | Node::Scalar(_) => 0,
            Node::PolyInH { shifts, .. } => 2 * shifts.len(),
            Node::Sum(ch) => ch.iter().map(|c| c.order).max().unwrap_or(0),
            Node::Product(ch) => ch.iter().map(|c| c.order).sum(),
            Node::Adjoint(c) => c.order,
        };
        Op { node: Arc::new(node), order }
    }

    pub fn node(&self) -> &Node {
        &self.node
    }

    /// Nominal differential order (an upper bound on the true order).
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn first_order(sign: f64, coeff: Coeff) -> Op {
        assert!(sign == 1.0 || sign == -1.0, "first-order sign must be +-1");
        Op::new(Node::FirstOrder { sign, coeff })
    }

    pub fn d() -> Op {
        Op::new(Node::Derivative)
    }

    pub fn multiply(coeff: Coeff) -> Op {
        Op::new(Node::Multiply(coeff))
    }

    pub fn scalar(c: Complex64) -> Op {
        Op::new(Node::Scalar(c))
    }

    pub fn real(c: f64) -> Op {
        Op::scalar(Complex64::new(c, 0.0))
    }

    pub fn identity() -> Op {
        Op::real(1.0)
    }

    pub fn zero() -> Op {
        Op::real(0.0)
    }

    pub fn poly_h(chain: &Arc<Chain>, shifts: &[f64]) -> Op {
        Op::new(Node::PolyInH { chain: chain.clone(), shifts: shifts.to_vec() })
    }

    pub fn sum(children: Vec<Op>) -> Op {
        Op::new(Node::Sum(children))
    }

    pub fn product(children: Vec<Op>) -> Op {
        if children.is_empty() {
            return Op::identity();
        }
        Op::new(Node::Product(children))
    }

    /// Lazy adjoint node; `adjoint()` gives the normalized form.
    pub fn adjoint_node(&self) -> Op {
        Op::new(Node::Adjoint(self.clone()))
    }

    pub fn add(&self, other: &Op) -> Op {
        Op::sum(vec![self.clone(), other.clone()])
    }

    pub fn sub(&self, other: &Op) -> Op {
        Op::sum(vec![self.clone(), other.scale(-1.0)])
    }

    /// `self * other`: `other` acts first.
    pub fn then(&self, other: &Op) -> Op {
        Op::product(vec![self.clone(), other.clone()])
    }

    pub fn scale(&self, s: f64) -> Op {
        self.scale_c(Complex64::new(s, 0.0))
    }

    pub fn scale_c(&self, s: Complex64) -> Op {
        Op::product(vec![Op::scalar(s), self.clone()])
    }

    /// Formal adjoint with the normalization rules pushed to the leaves.
    pub fn adjoint(&self) -> Op {
        match &*self.node {
            Node::FirstOrder { sign, coeff } => Op::first_order(-sign, coeff.clone()),
            Node::Derivative => Op::d().scale(-1.0),
            Node::Multiply(_) | Node::PolyInH { .. } => self.clone(),
            Node::Scalar(c) => Op::scalar(c.conj()),
            Node::Sum(ch) => Op::sum(ch.iter().map(Op::adjoint).collect()),
            Node::Product(ch) => Op::product(ch.iter().rev().map(Op::adjoint).collect()),
            Node::Adjoint(c) => c.clone(),
        }
    }

    /// Declared singular points of every coefficient in `[lo, hi]`.
    pub fn poles(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut out = Vec::new();
        self.collect_poles(lo, hi, &mut out);
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        out
    }

    fn collect_poles(&self, lo: f64, hi: f64, out: &mut Vec<f64>) {
        match &*self.node {
            Node::FirstOrder { coeff, .. } | Node::Multiply(coeff) => out.extend(coeff.poles(lo, hi)),
            Node::PolyInH { chain, .. } => out.extend(chain_poles(chain, lo, hi)),
            Node::Sum(ch) | Node::Product(ch) => ch.iter().for_each(|c| c.collect_poles(lo, hi, out)),
            Node::Adjoint(c) => c.collect_poles(lo, hi, out),
            Node::Derivative | Node::Scalar(_) => {}
        }
    }

    /// Action on a jet; the result has order `f.order() - self.order()`.
    pub fn apply_jet(&self, f: &Jet<Complex64>) -> Result<Jet<Complex64>, DiffError> {
        if f.order() < self.order {
            return Err(crate::numkern::NumError::OrderExhausted { needed: self.order, available: f.order() }.into());
        }
        let x = f.point();
        let out = f.order() - self.order;
        Ok(match &*self.node {
            Node::FirstOrder { sign, coeff } => {
                let c = coeff.eval(x, out)?;
                f.derivative()?.scale_by(Complex64::new(*sign, 0.0)).add(&f.truncate(out).mul_real(&c)?)?
            }
            Node::Derivative => f.derivative()?,
            Node::Multiply(coeff) => f.mul_real(&coeff.eval(x, out)?)?,
            Node::Scalar(c) => f.scale_by(*c),
            Node::PolyInH { chain, shifts } => {
                let mut g = f.clone();
                for &s in shifts {
                    let o = g.order() - 2;
                    let v = chain.potential_jet(x, o)?;
                    let lap = g.derivative()?.derivative()?;
                    g = g.truncate(o).mul_real(&v.add_constant(s)?)?.sub(&lap)?;
                }
                g
            }
            Node::Sum(ch) => {
                let mut acc = Jet::zero(x, out);
                for c in ch {
                    acc = acc.add(&c.apply_jet(&f.truncate(out + c.order))?)?;
                }
                acc
            }
            Node::Product(ch) => {
                let mut g = f.clone();
                for c in ch.iter().rev() {
                    g = c.apply_jet(&g)?;
                }
                g
            }
            Node::Adjoint(c) => c.adjoint().apply_jet(f)?,
        })
    }

    /// Value of the action on a function given as `x, order -> jet`.
    pub fn apply<F>(&self, f: &F, x: f64) -> Result<Complex64, DiffError>
    where
        F: Fn(f64, usize) -> Result<Jet<Complex64>, DiffError> + ?Sized,
    {
        Ok(self.apply_jet(&f(x, self.order)?)?.value())
    }

    /// Coefficients `c_m(x)` of `sum_m c_m d^m/dx^m`, from the action on
    /// the monomials `(y - x)^m / m!`.
    pub fn symbol(&self, x: f64) -> Result<Vec<Complex64>, DiffError> {
        let mut out: Vec<Complex64> = Vec::with_capacity(self.order + 1);
        for m in 0..=self.order {
            let jet = Jet::<Complex64>::monomial(x, m, self.order);
            let v = self.apply_jet(&jet)?.value();
            out.push(v);
        }
        Ok(out)
    }
}

/// Highest `m` with a symbol coefficient above `rel_tol` relative to the
/// largest one, maximized over `points`.
pub fn effective_order(op: &Op, points: &[f64], rel_tol: f64) -> Result<usize, DiffError> {
    let mut best = 0;
    for &x in points {
        let s = op.symbol(x)?;
        let scale = s.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1.0);
        if let Some(m) = s.iter().rposition(|c| c.norm() > rel_tol * scale) {
            best = best.max(m);
        }
    }
    Ok(best)
}
