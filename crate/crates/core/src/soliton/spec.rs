use super::SolitonError;
use crate::numkern::RealSeed;
use serde::{Deserialize, Serialize};

/// Raw parameters of an n-soliton system before validation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolitonSpec {
    pub kappas: Vec<f64>,
    pub taus: Vec<f64>,
    /// Factorization order as 1-based seed indices; empty means identity.
    #[serde(default)]
    pub seed_order: Vec<usize>,
}

impl SolitonSpec {
    pub fn new(kappas: &[f64], taus: &[f64]) -> Self {
        SolitonSpec { kappas: kappas.to_vec(), taus: taus.to_vec(), seed_order: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.kappas.len()
    }
}

/// A spec that passed [`validate_spec`]: kappas strictly increasing and
/// positive, and a genuine permutation stored 0-based.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidatedSpec {
    kappas: Vec<f64>,
    taus: Vec<f64>,
    #[serde(skip)]
    kinds: Vec<RealSeed>,
    order: Vec<usize>,
}

pub fn validate_spec(s: &SolitonSpec) -> Result<ValidatedSpec, SolitonError> {
    let n = s.kappas.len();
    if s.taus.len() != n {
        return Err(SolitonError::LengthMismatch { kappas: n, taus: s.taus.len() });
    }
    if let Some(&k) = s.kappas.iter().find(|k| !(**k > 0.0) || !k.is_finite()) {
        return Err(SolitonError::NonPositiveKappa(k));
    }
    if s.taus.iter().any(|t| !t.is_finite()) {
        return Err(SolitonError::NonFiniteTau);
    }
    for i in 1..n {
        if s.kappas[i] <= s.kappas[i - 1] {
            return Err(SolitonError::OrderingViolation { index: i + 1 });
        }
    }
    let order = if s.seed_order.is_empty() {
        (0..n).collect()
    } else {
        let mut seen = vec![false; n];
        let ok = s.seed_order.len() == n
            && s.seed_order.iter().all(|&p| {
                let fresh = (1..=n).contains(&p) && !seen[p - 1];
                if fresh {
                    seen[p - 1] = true;
                }
                fresh
            });
        if !ok {
            return Err(SolitonError::InvalidPermutation(s.seed_order.clone()));
        }
        s.seed_order.iter().map(|p| p - 1).collect()
    };
    let kinds = (1..=n).map(seed_kind).collect();
    Ok(ValidatedSpec { kappas: s.kappas.clone(), taus: s.taus.clone(), kinds, order })
}

/// Seed for 1-based index j: cosh for odd j, sinh for even j.
pub fn seed_kind(j: usize) -> RealSeed {
    if j % 2 == 1 {
        RealSeed::Cosh
    } else {
        RealSeed::Sinh
    }
}

/// The non-physical partner of a seed, used to build bound states.
pub fn partner_kind(kind: RealSeed) -> RealSeed {
    match kind {
        RealSeed::Cosh => RealSeed::Sinh,
        RealSeed::Sinh => RealSeed::Cosh,
        other => other,
    }
}

impl ValidatedSpec {
    pub fn n(&self) -> usize {
        self.kappas.len()
    }

    pub fn kappas(&self) -> &[f64] {
        &self.kappas
    }

    pub fn taus(&self) -> &[f64] {
        &self.taus
    }

    pub fn kappa(&self, j: usize) -> f64 {
        self.kappas[j - 1]
    }

    pub fn tau(&self, j: usize) -> f64 {
        self.taus[j - 1]
    }

    /// Seed function of 1-based seed `j`.
    pub fn kind(&self, j: usize) -> RealSeed {
        self.kinds[j - 1]
    }

    /// 1-based seed index used at 1-based factorization level `level`.
    pub fn seed_at(&self, level: usize) -> usize {
        self.order[level - 1] + 1
    }

    /// 1-based factorization level at which seed `j` enters.
    pub fn level_of(&self, j: usize) -> usize {
        self.order.iter().position(|&p| p == j - 1).expect("seed index in range") + 1
    }

    pub fn seed_order(&self) -> Vec<usize> {
        self.order.iter().map(|p| p + 1).collect()
    }

    pub fn is_identity_order(&self) -> bool {
        self.order.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// Same kappas and taus, different factorization order (1-based).
    pub fn with_seed_order(&self, order: &[usize]) -> Result<ValidatedSpec, SolitonError> {
        let mut v = validate_spec(&SolitonSpec {
            kappas: self.kappas.clone(),
            taus: self.taus.clone(),
            seed_order: order.to_vec(),
        })?;
        v.kinds = self.kinds.clone();
        Ok(v)
    }

    /// Subsystem built from the first `levels` factors of this chain.
    pub fn prefix(&self, levels: usize) -> ValidatedSpec {
        let mut idx: Vec<usize> = self.order[..levels].to_vec();
        idx.sort_unstable();
        let kappas = idx.iter().map(|&i| self.kappas[i]).collect();
        let taus = idx.iter().map(|&i| self.taus[i]).collect();
        let kinds = idx.iter().map(|&i| self.kinds[i]).collect();
        let order = self.order[..levels]
            .iter()
            .map(|p| idx.iter().position(|q| q == p).unwrap())
            .collect();
        ValidatedSpec { kappas, taus, kinds, order }
    }

    pub fn to_spec(&self) -> SolitonSpec {
        SolitonSpec { kappas: self.kappas.clone(), taus: self.taus.clone(), seed_order: self.seed_order() }
    }

    /// Largest distance scale of the system: `max |tau_j| + 1/kappa_1`.
    pub fn extent(&self) -> f64 {
        let t = self.taus.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        t + self.kappas.first().map_or(1.0, |k| 1.0 / k)
    }
}
