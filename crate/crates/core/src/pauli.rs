//! Spin-1/2 reading of an extended system: a planar particle with
//! `A_y = a(x)`, scalar potential `phi(x)` and field `B_z = a'(x)` whose
//! Pauli Hamiltonian at transverse momentum `k` is `diag(H_n, H_n')`.
//!
//! With the magnetic term `(g/2) sigma_3 B_z` the potentials are
//! `V_+- = (k + a)^2 - phi +- (g/2) a'`, so matching `V_n`, `V_n'` gives
//! `a = (2/g) d/dx ln(W'/W) + c0` and `phi = (a + k)^2 - (V_n + V_n')/2`.

use crate::soliton::{Chain, SolitonError};
use crate::susy::ExtendedSystem;
use crate::verify::standard_grid;
use serde::Serialize;
use std::sync::Arc;

/// `g_n = sqrt(2n(n+1))`, the ratio that makes `phi` constant for a
/// shifted pair of Poschl-Teller wells with `n` bound states.
pub fn g_n(n: usize) -> f64 {
    (2.0 * (n * (n + 1)) as f64).sqrt()
}

/// `Delta(x) = kappa (tanh kappa(x + tau) - tanh kappa(x + tau') - coth kappa(tau - tau'))`.
pub fn gap_profile(kappa: f64, tau: f64, tau_p: f64, x: f64) -> f64 {
    kappa * ((kappa * (x + tau)).tanh() - (kappa * (x + tau_p)).tanh() - 1.0 / (kappa * (tau - tau_p)).tanh())
}

#[derive(Clone, Debug)]
pub struct FieldProfile {
    upper: Arc<Chain>,
    lower: Arc<Chain>,
    pub k: f64,
    pub c0: f64,
    pub g: f64,
    /// Grid half-width and the points the profile is sampled on.
    pub half_width: f64,
    pub grid: Vec<f64>,
}

/// One grid sample of the fields.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FieldSample {
    pub x: f64,
    pub a: f64,
    pub phi: f64,
    pub bz: f64,
}

/// `c0` that turns `a + k` into `(g/2)` times the negative gap function:
/// `(g/2) C_1 - k` when the pair `(1, 1)` has a finite shift constant,
/// otherwise 0.
pub fn canonical_c0(sys: &ExtendedSystem, k: f64, g: f64) -> f64 {
    sys.constants
        .iter()
        .find(|c| c.j == 1 && c.jp == 1)
        .and_then(|c| c.value)
        .map_or(0.0, |c| 0.5 * g * c - k)
}

pub fn field_profile(sys: &ExtendedSystem, k: f64, c0: f64, g: f64) -> FieldProfile {
    assert!(g > 0.0 && g.is_finite(), "gyromagnetic ratio must be positive");
    let half = sys.half_width();
    let mut poles = sys.upper_chain.singular_points(-half, half);
    poles.extend(sys.lower_chain.singular_points(-half, half));
    let grid = standard_grid(sys.kappa_min(), &poles).points;
    FieldProfile { upper: sys.upper_chain.clone(), lower: sys.lower_chain.clone(), k, c0, g, half_width: half, grid }
}

impl FieldProfile {
    /// `(a, a')` at `x`.
    fn a_jet(&self, x: f64) -> Result<(f64, f64), SolitonError> {
        let lu = self.upper.log_wronskian_derivative(x, 1)?;
        let ll = self.lower.log_wronskian_derivative(x, 1)?;
        let s = 2.0 / self.g;
        Ok((s * (ll.value() - lu.value()) + self.c0, s * (ll.derivative_value(1) - lu.derivative_value(1))))
    }

    pub fn a(&self, x: f64) -> Result<f64, SolitonError> {
        Ok(self.a_jet(x)?.0)
    }

    /// `B_z = (V_n - V_n') / g`.
    pub fn bz(&self, x: f64) -> Result<f64, SolitonError> {
        Ok((self.upper.potential(x)? - self.lower.potential(x)?) / self.g)
    }

    pub fn phi(&self, x: f64) -> Result<f64, SolitonError> {
        let a = self.a(x)?;
        Ok((a + self.k).powi(2) - 0.5 * (self.upper.potential(x)? + self.lower.potential(x)?))
    }

    /// `a'` from the Wronskians, independent of [`FieldProfile::bz`].
    pub fn da(&self, x: f64) -> Result<f64, SolitonError> {
        Ok(self.a_jet(x)?.1)
    }

    /// `(V_+, V_-) = (k + a)^2 - phi +- (g/2) a'`.
    pub fn reconstructed(&self, x: f64) -> Result<(f64, f64), SolitonError> {
        let (a, da) = self.a_jet(x)?;
        let base = (a + self.k).powi(2) - self.phi(x)?;
        Ok((base + 0.5 * self.g * da, base - 0.5 * self.g * da))
    }

    pub fn potentials(&self, x: f64) -> Result<(f64, f64), SolitonError> {
        Ok((self.upper.potential(x)?, self.lower.potential(x)?))
    }

    pub fn sample(&self, x: f64) -> Result<FieldSample, SolitonError> {
        Ok(FieldSample { x, a: self.a(x)?, phi: self.phi(x)?, bz: self.bz(x)? })
    }

    pub fn samples(&self) -> Result<Vec<FieldSample>, SolitonError> {
        self.grid.iter().map(|&x| self.sample(x)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhiCheck {
    pub is_constant: bool,
    /// Midrange of `phi` over the grid.
    pub value: f64,
    /// `max phi - min phi` over the grid.
    pub deviation: f64,
}

pub fn constant_phi_check(profile: &FieldProfile) -> Result<PhiCheck, SolitonError> {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &x in &profile.grid {
        let p = profile.phi(x)?;
        lo = lo.min(p);
        hi = hi.max(p);
    }
    let value = 0.5 * (lo + hi);
    let deviation = hi - lo;
    Ok(PhiCheck { is_constant: deviation <= 1e-9 * value.abs().max(1.0), value, deviation })
}
