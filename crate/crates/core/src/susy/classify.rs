use super::SusyError;
use crate::diffop::{shift_constant, DiffError, Seed};
use crate::soliton::{Chain, ValidatedSpec};
use serde::Serialize;
use std::sync::Arc;

/// Isospectrality pattern of a pair of reflectionless systems.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum IsoClass {
    CompleteBreak,
    /// One coinciding level `kappa_j = kappa'_j`.
    PartialSameLevel { j: usize, tau_equal: bool },
    /// One coinciding pair `kappa_j = kappa'_jp` with `j != jp`; `tau_cond`
    /// records `tau_j = tau'_jp`.
    PartialCrossLevel { j: usize, jp: usize, tau_cond: bool },
    /// Two or more, but not all, levels coincide (`n >= 3`).
    PartialMulti { pairs: Vec<(usize, usize)> },
    ExactGeneric,
    /// All kappas coincide and the shifts of level `j` coincide too.
    ExactCommonVirtual { j: usize },
    /// All kappas coincide and every shift constant `C_j` is the same.
    SpecialCequal,
    Identical,
}

impl IsoClass {
    pub fn tag(&self) -> &'static str {
        match self {
            IsoClass::CompleteBreak => "CompleteBreak",
            IsoClass::PartialSameLevel { .. } => "PartialSameLevel",
            IsoClass::PartialCrossLevel { .. } => "PartialCrossLevel",
            IsoClass::PartialMulti { .. } => "PartialMulti",
            IsoClass::ExactGeneric => "ExactGeneric",
            IsoClass::ExactCommonVirtual { .. } => "ExactCommonVirtual",
            IsoClass::SpecialCequal => "SpecialCequal",
            IsoClass::Identical => "Identical",
        }
    }
}

/// `C` of one coinciding pair; `None` when equal shifts make it diverge.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShiftConstant {
    pub j: usize,
    pub jp: usize,
    pub kappa: f64,
    pub value: Option<f64>,
}

/// `diag(H_n, H_n')` together with its classification.
#[derive(Clone, Debug)]
pub struct ExtendedSystem {
    pub upper: ValidatedSpec,
    pub lower: ValidatedSpec,
    pub class: IsoClass,
    pub constants: Vec<ShiftConstant>,
    pub upper_chain: Arc<Chain>,
    pub lower_chain: Arc<Chain>,
}

impl ExtendedSystem {
    pub fn new(upper: &ValidatedSpec, lower: &ValidatedSpec, tol: f64) -> Result<Self, SusyError> {
        let class = classify(upper, lower, tol)?;
        let constants = coinciding_pairs(upper, lower, tol)?
            .into_iter()
            .map(|(j, jp)| {
                let value = match shift_constant(Seed::of(upper, j), Seed::of(lower, jp)) {
                    Ok(c) => Some(c),
                    Err(DiffError::DegenerateShift) => None,
                    Err(e) => return Err(e),
                };
                Ok(ShiftConstant { j, jp, kappa: upper.kappa(j), value })
            })
            .collect::<Result<_, DiffError>>()?;
        Ok(ExtendedSystem {
            upper: upper.clone(),
            lower: lower.clone(),
            class,
            constants,
            upper_chain: Arc::new(Chain::new(upper.clone())),
            lower_chain: Arc::new(Chain::new(lower.clone())),
        })
    }

    pub fn n(&self) -> usize {
        self.upper.n()
    }

    /// Number of coinciding kappa pairs.
    pub fn coincidences(&self) -> usize {
        self.constants.len()
    }

    /// Smallest `kappa_1` of the two blocks, which sets the grid scale.
    pub fn kappa_min(&self) -> f64 {
        let first = |s: &ValidatedSpec| s.kappas().first().copied().unwrap_or(1.0);
        first(&self.upper).min(first(&self.lower))
    }

    /// Half-width of the evaluation window.
    pub fn half_width(&self) -> f64 {
        8.0 / self.kappa_min()
    }
}

fn scale(a: f64, b: f64) -> f64 {
    a.abs().max(b.abs())
}

/// Pairs `(j, j')` with `kappa_j = kappa'_j'`, rejecting near misses.
pub fn coinciding_pairs(upper: &ValidatedSpec, lower: &ValidatedSpec, tol: f64) -> Result<Vec<(usize, usize)>, SusyError> {
    let mut pairs = Vec::new();
    for j in 1..=upper.n() {
        for jp in 1..=lower.n() {
            let (a, b) = (upper.kappa(j), lower.kappa(jp));
            let diff = (a - b).abs();
            let s = scale(a, b);
            if diff <= tol * s {
                pairs.push((j, jp));
            } else if diff <= 10.0 * tol * s {
                return Err(SusyError::AmbiguousWithinTolerance { j, jp, diff });
            }
        }
    }
    Ok(pairs)
}

fn same(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * scale(a, b).max(1.0)
}

pub fn classify(upper: &ValidatedSpec, lower: &ValidatedSpec, tol: f64) -> Result<IsoClass, SusyError> {
    let n = upper.n();
    if lower.n() != n {
        return Err(SusyError::UnequalSizes(n, lower.n()));
    }
    let pairs = coinciding_pairs(upper, lower, tol)?;
    let tau_eq = |j: usize, jp: usize| same(upper.tau(j), lower.tau(jp), tol);
    Ok(match pairs.len() {
        0 => IsoClass::CompleteBreak,
        r if r < n => {
            if r > 1 {
                IsoClass::PartialMulti { pairs }
            } else {
                let (j, jp) = pairs[0];
                if j == jp {
                    IsoClass::PartialSameLevel { j, tau_equal: tau_eq(j, j) }
                } else {
                    IsoClass::PartialCrossLevel { j, jp, tau_cond: tau_eq(j, jp) }
                }
            }
        }
        _ => {
            let equal: Vec<usize> = (1..=n).filter(|&j| tau_eq(j, j)).collect();
            if equal.len() == n {
                IsoClass::Identical
            } else if let Some(&j) = equal.first() {
                IsoClass::ExactCommonVirtual { j }
            } else {
                let cs: Vec<f64> = (1..=n)
                    .map(|j| shift_constant(Seed::of(upper, j), Seed::of(lower, j)))
                    .collect::<Result<_, _>>()?;
                if cs.iter().all(|c| same(*c, cs[0], tol)) {
                    IsoClass::SpecialCequal
                } else {
                    IsoClass::ExactGeneric
                }
            }
        }
    })
}
