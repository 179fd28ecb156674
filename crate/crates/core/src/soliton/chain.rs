use super::spec::ValidatedSpec;
use super::SolitonError;
use crate::numkern::{seed_jet, Jet, NumError, RealSeed, POLE_GUARD};
use std::sync::Arc;

/// Darboux-Crum chain of a validated spec, in its factorization order.
///
/// Level `j` carries `phi_j = A_{j-1}...A_1 psi_{p(j)}` and
/// `w_j = (ln phi_j)'`, so that `A_j = d/dx - w_j`.
#[derive(Clone, Debug)]
pub struct Chain {
    spec: ValidatedSpec,
}

/// Jets of every chain function at one point.
#[derive(Clone, Debug)]
pub struct ChainPoint {
    pub phis: Vec<Jet<f64>>,
    pub ws: Vec<Jet<f64>>,
}

/// One level of the chain.
#[derive(Clone, Debug)]
pub struct ChainNode {
    pub level: usize,
    pub seed: usize,
    pub energy: f64,
    chain: Arc<Chain>,
}

impl ChainNode {
    pub fn phi(&self, x: f64, order: usize) -> Result<Jet<f64>, SolitonError> {
        Ok(self.chain.eval(x, order)?.phis[self.level - 1].truncate(order))
    }

    pub fn w(&self, x: f64, order: usize) -> Result<Jet<f64>, SolitonError> {
        Ok(self.chain.eval(x, order)?.ws[self.level - 1].truncate(order))
    }
}

pub fn build_chain(spec: &ValidatedSpec) -> Vec<ChainNode> {
    let chain = Arc::new(Chain::new(spec.clone()));
    (1..=spec.n())
        .map(|level| {
            let seed = spec.seed_at(level);
            ChainNode { level, seed, energy: -spec.kappa(seed).powi(2), chain: chain.clone() }
        })
        .collect()
}

fn singular(level: usize, x: f64) -> impl Fn(NumError) -> SolitonError {
    move |e| match e {
        NumError::PoleProximity { .. } | NumError::ZeroBase { .. } => SolitonError::SingularChain { level, x },
        other => SolitonError::Numeric(other),
    }
}

impl Chain {
    pub fn new(spec: ValidatedSpec) -> Self {
        Chain { spec }
    }

    pub fn spec(&self) -> &ValidatedSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.spec.n()
    }

    /// Evaluates every level at `x`; all returned `ws` have order at least
    /// `order` and all `phis` at least `order + 1`.
    pub fn eval(&self, x: f64, order: usize) -> Result<ChainPoint, SolitonError> {
        let n = self.n();
        let top = order + n;
        let mut ws: Vec<Jet<f64>> = Vec::with_capacity(n);
        let mut phis = Vec::with_capacity(n);
        for j in 0..n {
            let seed = self.spec.seed_at(j + 1);
            let (kappa, tau, kind) = (self.spec.kappa(seed), self.spec.tau(seed), self.spec.kind(seed));
            let err = singular(j + 1, x);
            let mut phi = seed_jet(kind, kappa, tau, x, top).map_err(&err)?;
            for w in ws.iter() {
                phi = phi.derivative().and_then(|d| d.sub(&w.mul(&phi)?)).map_err(&err)?;
            }
            let c = phi.coeffs();
            if c[0].abs() < POLE_GUARD / kappa * c[1].abs() {
                return Err(SolitonError::SingularChain { level: j + 1, x });
            }
            let w = if j == 0 {
                let log_kind = if kind == RealSeed::Cosh { RealSeed::Tanh } else { RealSeed::Coth };
                seed_jet(log_kind, kappa, tau, x, top - 1).map_err(&err)?.scale_by(kappa)
            } else {
                phi.log_derivative().map_err(&err)?
            };
            ws.push(w);
            phis.push(phi);
        }
        Ok(ChainPoint { phis, ws })
    }

    /// Jet of `(ln W_n)' = sum_j w_j`.
    pub fn log_wronskian_derivative(&self, x: f64, order: usize) -> Result<Jet<f64>, SolitonError> {
        let cp = self.eval(x, order)?;
        let mut s = Jet::zero(x, order);
        for w in &cp.ws {
            s = s.add(&w.truncate(order))?;
        }
        Ok(s)
    }

    /// Jet of `V_n = -2 sum_j w_j'`.
    pub fn potential_jet(&self, x: f64, order: usize) -> Result<Jet<f64>, SolitonError> {
        Ok(self.log_wronskian_derivative(x, order + 1)?.derivative()?.scale_by(-2.0))
    }

    pub fn potential(&self, x: f64) -> Result<f64, SolitonError> {
        Ok(self.potential_jet(x, 0)?.value())
    }

    /// Points in `[lo, hi]` where some `phi_j` of this factorization
    /// vanishes, found as sign changes of the partial Wronskians.
    pub fn singular_points(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for levels in 1..=self.n() {
            let sub = self.spec.prefix(levels);
            let sign = |x: f64| super::wronskian::wronskian_sign(&sub, x);
            let steps = ((hi - lo) / 1e-2).ceil().max(1.0) as usize;
            let h = (hi - lo) / steps as f64;
            let mut prev = sign(lo);
            for i in 1..=steps {
                let x = lo + i as f64 * h;
                let cur = sign(x);
                if cur != prev && cur != 0.0 && prev != 0.0 {
                    let (mut a, mut b) = (x - h, x);
                    for _ in 0..60 {
                        let m = 0.5 * (a + b);
                        if sign(m) == prev {
                            a = m;
                        } else {
                            b = m;
                        }
                    }
                    let z = 0.5 * (a + b);
                    if !out.iter().any(|p: &f64| (p - z).abs() < 1e-9) {
                        out.push(z);
                    }
                }
                prev = cur;
            }
        }
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out
    }
}

/// `V_n(x)` through the chain recursion.
pub fn potential(spec: &ValidatedSpec, x: f64) -> Result<f64, SolitonError> {
    Chain::new(spec.clone()).potential(x)
}
