use super::jet::Jet;
use super::NumError;
use num_complex::Complex64;
use std::f64::consts::LN_2;

/// Real seed functions of `y = kappa (x + tau)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RealSeed {
    Cosh,
    Sinh,
    Tanh,
    Coth,
}

/// Minimum `|kappa (x + tau)|` allowed when evaluating `coth`.
pub const POLE_GUARD: f64 = 1e-3;

/// Default jet order for an n-soliton pipeline.
pub const fn default_order(n: usize) -> usize {
    2 * n + 8
}

/// Jet of `cosh`, `sinh`, `tanh` or `coth` of `kappa (x + tau)` at `x`.
pub fn seed_jet(kind: RealSeed, kappa: f64, tau: f64, x: f64, order: usize) -> Result<Jet<f64>, NumError> {
    let y = kappa * (x + tau);
    match kind {
        RealSeed::Cosh | RealSeed::Sinh => Ok(hyperbolic(kind == RealSeed::Cosh, kappa, y, x, order)),
        RealSeed::Tanh => Ok(riccati(y.tanh(), kappa / y.cosh().powi(2), kappa, x, order)),
        RealSeed::Coth => {
            if y.abs() < POLE_GUARD {
                return Err(NumError::PoleProximity { pole: -tau, point: x });
            }
            riccati_checked(1.0 / y.tanh(), -kappa / y.sinh().powi(2), kappa, x, order, -tau)
        }
    }
}

fn hyperbolic(is_cosh: bool, kappa: f64, y: f64, x: f64, order: usize) -> Jet<f64> {
    // cosh y = e^|y| (1 + e^{-2|y|}) / 2, sinh y = sgn(y) e^|y| (1 - e^{-2|y|}) / 2
    let a = y.abs();
    let plus = 1.0 + (-2.0 * a).exp();
    let minus = -(-2.0 * a).exp_m1() * y.signum();
    let (even, odd) = if is_cosh { (plus, minus) } else { (minus, plus) };
    let mut c = Vec::with_capacity(order + 1);
    let mut t = 1.0;
    for m in 0..=order {
        if m > 0 {
            t *= kappa / m as f64;
        }
        c.push(t * if m % 2 == 0 { even } else { odd });
    }
    Jet::from_parts(x, a - LN_2, c)
}

// Jet of T with T' = kappa (1 - T^2), given T and T' exactly.
fn riccati(t0: f64, t1: f64, kappa: f64, x: f64, order: usize) -> Jet<f64> {
    let mut c = vec![0.0; order + 1];
    c[0] = t0;
    if order >= 1 {
        c[1] = t1;
    }
    for m in 1..order {
        let s: f64 = (0..=m).map(|k| c[k] * c[m - k]).sum();
        c[m + 1] = -kappa * s / (m + 1) as f64;
    }
    Jet::from_taylor(x, c)
}

fn riccati_checked(t0: f64, t1: f64, kappa: f64, x: f64, order: usize, pole: f64) -> Result<Jet<f64>, NumError> {
    let j = riccati(t0, t1, kappa, x, order);
    if j.coeffs().iter().all(|c| c.is_finite()) && j.log_scale().is_finite() {
        Ok(j)
    } else {
        Err(NumError::PoleProximity { pole, point: x })
    }
}

/// Jet of `exp(i k x)`.
pub fn exp_ikx(k: f64, x: f64, order: usize) -> Jet<Complex64> {
    let ik = Complex64::new(0.0, k);
    let mut c = Vec::with_capacity(order + 1);
    let mut t = Complex64::from_polar(1.0, k * x);
    for m in 0..=order {
        if m > 0 {
            t = t * ik / m as f64;
        }
        c.push(t);
    }
    Jet::from_taylor(x, c)
}

/// Jet of `exp(-(x - center)^2 / (2 width^2) + i k x)`.
pub fn gaussian_packet(center: f64, width: f64, k: f64, x: f64, order: usize) -> Jet<Complex64> {
    let w2 = width * width;
    let mut g = vec![Complex64::new(0.0, 0.0); order.max(2) + 1];
    g[0] = Complex64::new(-(x - center).powi(2) / (2.0 * w2), k * x);
    g[1] = Complex64::new(-(x - center) / w2, k);
    g[2] = Complex64::new(-0.5 / w2, 0.0);
    Jet::from_taylor(x, g).exp().truncate(order)
}
