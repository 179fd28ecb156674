use super::DiffError;
use crate::numkern::{seed_jet, Jet, RealSeed};
use crate::soliton::Chain;
use std::fmt;
use std::sync::Arc;

type Evaluator = dyn Fn(f64, usize) -> Result<Jet<f64>, DiffError> + Send + Sync;

#[derive(Clone)]
enum Kind {
    Const(f64),
    /// `(ln seed)'`: `kappa tanh` for a cosh seed, `kappa coth` for sinh.
    SeedLog { kind: RealSeed, kappa: f64, tau: f64 },
    ChainW { chain: Arc<Chain>, level: usize },
    /// `(ln W_n)' = sum_j w_j`.
    LogWronskian(Arc<Chain>),
    Potential(Arc<Chain>),
    Sum(Vec<Coeff>),
    Product(Vec<Coeff>),
    Scaled(f64, Coeff),
    Derivative(Coeff),
    Custom { eval: Arc<Evaluator>, poles: Vec<f64> },
}

/// A real coefficient function, evaluated as a jet at any point.
#[derive(Clone)]
pub struct Coeff {
    kind: Arc<Kind>,
    label: String,
}

impl fmt::Debug for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

impl Coeff {
    fn new(kind: Kind, label: String) -> Self {
        Coeff { kind: Arc::new(kind), label }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn constant(c: f64) -> Self {
        Self::new(Kind::Const(c), format!("{c}"))
    }

    pub fn seed_log(kind: RealSeed, kappa: f64, tau: f64) -> Self {
        let name = if kind == RealSeed::Cosh { "tanh" } else { "coth" };
        Self::new(Kind::SeedLog { kind, kappa, tau }, format!("{kappa}*{name}({kappa},{tau})"))
    }

    pub fn chain_w(chain: &Arc<Chain>, level: usize) -> Self {
        Self::new(Kind::ChainW { chain: chain.clone(), level }, format!("w_{level}"))
    }

    pub fn log_wronskian(chain: &Arc<Chain>) -> Self {
        Self::new(Kind::LogWronskian(chain.clone()), "(ln W)'".into())
    }

    pub fn potential(chain: &Arc<Chain>) -> Self {
        Self::new(Kind::Potential(chain.clone()), "V".into())
    }

    pub fn custom<F>(label: &str, poles: Vec<f64>, f: F) -> Self
    where
        F: Fn(f64, usize) -> Result<Jet<f64>, DiffError> + Send + Sync + 'static,
    {
        Self::new(Kind::Custom { eval: Arc::new(f), poles }, label.into())
    }

    pub fn add(&self, other: &Coeff) -> Coeff {
        Self::new(Kind::Sum(vec![self.clone(), other.clone()]), format!("({} + {})", self.label, other.label))
    }

    pub fn sub(&self, other: &Coeff) -> Coeff {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Coeff) -> Coeff {
        Self::new(Kind::Product(vec![self.clone(), other.clone()]), format!("{}*{}", self.label, other.label))
    }

    pub fn scale(&self, s: f64) -> Coeff {
        Self::new(Kind::Scaled(s, self.clone()), format!("{s}*{}", self.label))
    }

    pub fn derivative(&self) -> Coeff {
        Self::new(Kind::Derivative(self.clone()), format!("d({})", self.label))
    }

    pub fn with_label(mut self, label: &str) -> Coeff {
        self.label = label.into();
        self
    }

    pub fn eval(&self, x: f64, order: usize) -> Result<Jet<f64>, DiffError> {
        Ok(match &*self.kind {
            Kind::Const(c) => Jet::constant(x, *c, order),
            Kind::SeedLog { kind, kappa, tau } => {
                let lk = if *kind == RealSeed::Cosh { RealSeed::Tanh } else { RealSeed::Coth };
                seed_jet(lk, *kappa, *tau, x, order)?.scale_by(*kappa)
            }
            Kind::ChainW { chain, level } => chain.eval(x, order)?.ws[level - 1].truncate(order),
            Kind::LogWronskian(chain) => chain.log_wronskian_derivative(x, order)?,
            Kind::Potential(chain) => chain.potential_jet(x, order)?,
            Kind::Sum(parts) => {
                let mut acc = Jet::zero(x, order);
                for p in parts {
                    acc = acc.add(&p.eval(x, order)?)?;
                }
                acc
            }
            Kind::Product(parts) => {
                let mut acc = Jet::constant(x, 1.0, order);
                for p in parts {
                    acc = acc.mul(&p.eval(x, order)?)?;
                }
                acc
            }
            Kind::Scaled(s, c) => c.eval(x, order)?.scale_by(*s),
            Kind::Derivative(c) => c.eval(x, order + 1)?.derivative()?,
            Kind::Custom { eval, .. } => eval(x, order)?.truncate(order),
        })
    }

    /// Singular points of this coefficient inside `[lo, hi]`.
    pub fn poles(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut out = Vec::new();
        self.collect_poles(lo, hi, &mut out);
        out
    }

    fn collect_poles(&self, lo: f64, hi: f64, out: &mut Vec<f64>) {
        match &*self.kind {
            Kind::Const(_) => {}
            Kind::SeedLog { kind, tau, .. } => {
                if *kind == RealSeed::Sinh && (lo..=hi).contains(&-tau) {
                    out.push(-tau);
                }
            }
            Kind::ChainW { chain, .. } | Kind::LogWronskian(chain) | Kind::Potential(chain) => {
                out.extend(chain_poles(chain, lo, hi));
            }
            Kind::Sum(parts) | Kind::Product(parts) => {
                for p in parts {
                    p.collect_poles(lo, hi, out);
                }
            }
            Kind::Scaled(_, c) | Kind::Derivative(c) => c.collect_poles(lo, hi, out),
            Kind::Custom { poles, .. } => out.extend(poles.iter().copied().filter(|p| (lo..=hi).contains(p))),
        }
    }
}

/// Chains in natural order with the standard cosh/sinh alternation are
/// nodeless; anything else is scanned.
pub(crate) fn chain_poles(chain: &Chain, lo: f64, hi: f64) -> Vec<f64> {
    let spec = chain.spec();
    let standard = spec.is_identity_order() && (1..=spec.n()).all(|j| spec.kind(j) == crate::soliton::seed_kind(j));
    if standard {
        Vec::new()
    } else {
        chain.singular_points(lo, hi)
    }
}
