use super::chain::Chain;
use super::spec::ValidatedSpec;
use super::SolitonError;
use crate::numkern::{exp_ikx, Jet};
use num_complex::Complex64;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Direction {
    Right,
    Left,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Right => 1.0,
            Direction::Left => -1.0,
        }
    }
}

/// Unnormalized bound state of energy `-kappa_j^2`.
///
/// Built as `A_n...A_{l+1} (1/phi_l)` where `l` is the level of seed `j`:
/// `1/phi_l` is the zero mode of `A_l^dagger`, and the remaining factors
/// carry it up the chain. Every factor acts on a decaying function, so
/// nothing large cancels in the tails.
pub fn bound_state(spec: &ValidatedSpec, j: usize, x: f64, order: usize) -> Result<Jet<f64>, SolitonError> {
    assert!((1..=spec.n()).contains(&j), "level out of range");
    let n = spec.n();
    let level = spec.level_of(j);
    let cp = Chain::new(spec.clone()).eval(x, order + n)?;
    let mut f = cp.phis[level - 1].recip()?;
    for w in &cp.ws[level..] {
        f = f.derivative()?.sub(&w.mul(&f)?)?;
    }
    Ok(f.truncate(order))
}

/// `A_n...A_1 exp(+-ikx)`; `k = 0` gives the edge state.
pub fn scatter_state(
    spec: &ValidatedSpec,
    k: f64,
    dir: Direction,
    x: f64,
    order: usize,
) -> Result<Jet<Complex64>, SolitonError> {
    let n = spec.n();
    let cp = Chain::new(spec.clone()).eval(x, order + n)?;
    let mut f = exp_ikx(dir.sign() * k, x, order + n);
    for w in &cp.ws {
        f = f.derivative()?.sub(&f.mul_real(w)?)?;
    }
    Ok(f.truncate(order))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Transmission {
    /// `prod_j (k - i kappa_j) / (k + i kappa_j)`.
    pub closed_form: Complex64,
    /// Ratio of the plane-wave amplitudes of `A_n e^{ikx}` at `-X` and `+X`.
    pub asymptotic: Complex64,
    pub x_far: f64,
}

pub fn transmission_closed_form(spec: &ValidatedSpec, k: f64) -> Complex64 {
    spec.kappas()
        .iter()
        .map(|&kap| Complex64::new(k, -kap) / Complex64::new(k, kap))
        .product()
}

pub fn far_field(spec: &ValidatedSpec) -> f64 {
    match (spec.kappas().first(), spec.kappas().last()) {
        (Some(k1), Some(kn)) => 12.0 / k1 + 12.0 / kn + spec.taus().iter().fold(0.0f64, |m, t| m.max(t.abs())),
        _ => 12.0,
    }
}

pub fn transmission(spec: &ValidatedSpec, k: f64) -> Result<Transmission, SolitonError> {
    let closed_form = transmission_closed_form(spec, k);
    let ratio = |x_far: f64| -> Result<Complex64, SolitonError> {
        let left = scatter_state(spec, k, Direction::Right, -x_far, 0)?.value();
        let right = scatter_state(spec, k, Direction::Right, x_far, 0)?.value();
        let strip = |x: f64| Complex64::from_polar(1.0, -k * x);
        Ok(left * strip(-x_far) / (right * strip(x_far)))
    };
    let mut x_far = far_field(spec);
    for _ in 0..2 {
        let a = ratio(x_far)?;
        let b = ratio(1.25 * x_far)?;
        if (a - b).norm() <= 1e-10 {
            return Ok(Transmission { closed_form, asymptotic: b, x_far });
        }
        x_far *= 2.0;
    }
    Err(SolitonError::AsymptoticNotReached { x_far })
}

/// Which soliton is sent to infinity in the two-soliton asymptotic limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Receding {
    First,
    Second,
}

/// Shift `xi` of the surviving one-soliton well when the other soliton is
/// sent to `+-inf`: the limit is `-2 kappa_i^2 sech^2 kappa_i (x + tau_i -+ xi_i)`
/// with `sinh(kappa_i xi_i) = kappa_1 / sqrt(kappa_2^2 - kappa_1^2)` for
/// either surviving index `i` (so `kappa_1 xi_1 = kappa_2 xi_2`).
pub fn asymptotic_shift(spec: &ValidatedSpec, receding: Receding) -> f64 {
    assert_eq!(spec.n(), 2, "asymptotic shift is defined for two solitons");
    let (k1, k2) = (spec.kappa(1), spec.kappa(2));
    let phase = (k1 / (k2 * k2 - k1 * k1).sqrt()).asinh();
    match receding {
        Receding::Second => phase / k1,
        Receding::First => phase / k2,
    }
}

/// Locates the deepest point of the potential within `2/kappa_1` of
/// `guess`: a coarse scan followed by Newton on `V'`.
pub fn well_center(spec: &ValidatedSpec, guess: f64) -> Result<f64, SolitonError> {
    let chain = Chain::new(spec.clone());
    let half = 2.0 / spec.kappa(1);
    let mut x = guess;
    let mut best = f64::INFINITY;
    for i in 0..=400 {
        let t = guess - half + 2.0 * half * i as f64 / 400.0;
        let v = chain.potential(t)?;
        if v < best {
            best = v;
            x = t;
        }
    }
    for _ in 0..50 {
        let v = chain.potential_jet(x, 2)?;
        let step = v.derivative_value(1) / v.derivative_value(2);
        x -= step;
        if step.abs() < 1e-14 {
            break;
        }
    }
    Ok(x)
}
