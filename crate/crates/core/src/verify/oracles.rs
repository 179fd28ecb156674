use super::residual::{FunctionResidual, ResidualReport, SkippedPoint};
use super::suite::standard_grid;
use crate::diffop::{compose_a, lax_z, DiffError, Op};
use crate::numkern::{seed_jet, Jet};
use crate::soliton::{bound_state, scatter_state, Chain, Direction, SolitonError, ValidatedSpec};
use num_complex::Complex64;
use serde::Serialize;
use std::os::raw::{c_char, c_int};
use thiserror::Error;

extern crate openblas_src;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("LAPACK dsbevx returned info = {0}")]
    Lapack(i32),
    #[error("integration stalled at x = {x} with step {h:e}")]
    StiffIntegration { x: f64, h: f64 },
    #[error(transparent)]
    Soliton(#[from] SolitonError),
    #[error(transparent)]
    Diff(#[from] DiffError),
}

fn kappa1(spec: &ValidatedSpec) -> f64 {
    spec.kappas().first().copied().unwrap_or(1.0)
}

/// Lowest `n + 3` eigenvalues of `-d^2/dx^2 + V` on `[-l, l]` with
/// Dirichlet walls, from the fourth-order five-point stencil on `n_points`
/// interior nodes.
pub fn eigen_oracle(spec: &ValidatedSpec, l: f64, n_points: usize) -> Result<Vec<f64>, OracleError> {
    if l < 20.0 / kappa1(spec) {
        return Err(OracleError::Precondition(format!("L = {l} is below 20/kappa_1")));
    }
    if n_points < 2000 {
        return Err(OracleError::Precondition(format!("N = {n_points} is below 2000")));
    }
    let chain = Chain::new(spec.clone());
    let h = 2.0 * l / (n_points + 1) as f64;
    let s = 1.0 / (12.0 * h * h);
    let kd = 2usize;
    let ldab = kd + 1;
    let mut ab = vec![0.0f64; ldab * n_points];
    for j in 0..n_points {
        let x = -l + (j + 1) as f64 * h;
        ab[kd + j * ldab] = 30.0 * s + chain.potential(x)?;
        if j >= 1 {
            ab[kd - 1 + j * ldab] = -16.0 * s;
        }
        if j >= 2 {
            ab[j * ldab] = s;
        }
    }
    let want = (spec.n() + 3).min(n_points);
    let n = n_points as c_int;
    let (kd_i, ldab_i, one) = (kd as c_int, ldab as c_int, 1 as c_int);
    let (il, iu) = (1 as c_int, want as c_int);
    let (vl, vu, abstol) = (0.0f64, 0.0f64, 2.0 * f64::MIN_POSITIVE);
    let mut q = [0.0f64; 1];
    let mut z = [0.0f64; 1];
    let mut m: c_int = 0;
    let mut w = vec![0.0f64; n_points];
    let mut work = vec![0.0f64; 7 * n_points];
    let mut iwork = vec![0 as c_int; 5 * n_points];
    let mut ifail = vec![0 as c_int; n_points];
    let mut info: c_int = 0;
    // SAFETY: every array has the length dsbevx documents for jobz = 'N',
    // range = 'I' and the band layout above.
    unsafe {
        lapack_sys::dsbevx_(
            b"N".as_ptr() as *const c_char,
            b"I".as_ptr() as *const c_char,
            b"U".as_ptr() as *const c_char,
            &n,
            &kd_i,
            ab.as_mut_ptr(),
            &ldab_i,
            q.as_mut_ptr(),
            &one,
            &vl,
            &vu,
            &il,
            &iu,
            &abstol,
            &mut m,
            w.as_mut_ptr(),
            z.as_mut_ptr(),
            &one,
            work.as_mut_ptr(),
            iwork.as_mut_ptr(),
            ifail.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(OracleError::Lapack(info));
    }
    w.truncate(m as usize);
    Ok(w)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Scattering {
    pub t: Complex64,
    pub r: Complex64,
    pub x_far: f64,
    pub steps: usize,
}

type State = [Complex64; 2];

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

/// Adaptive Dormand-Prince integration of `y' = f(x, y)` from `x0` to `x1`
/// with mixed absolute/relative tolerance `tol`. Returns the state and the
/// number of accepted steps.
fn dopri5<F>(f: F, x0: f64, y0: State, x1: f64, tol: f64, h0: f64, max_steps: usize) -> Result<(State, usize), OracleError>
where
    F: Fn(f64, &State) -> Result<State, OracleError>,
{
    let dir = (x1 - x0).signum();
    let span = (x1 - x0).abs();
    let (mut x, mut y) = (x0, y0);
    let mut h = h0.min(span);
    let mut accepted = 0;
    let mut k = [[Complex64::new(0.0, 0.0); 2]; 7];
    k[0] = f(x, &y)?;
    for _ in 0..max_steps {
        if (x1 - x) * dir <= 0.0 {
            return Ok((y, accepted));
        }
        h = h.min((x1 - x).abs());
        for s in 1..7 {
            let mut ys = y;
            for (i, a) in A[s].iter().enumerate().take(s) {
                for c in 0..2 {
                    ys[c] += k[i][c] * (a * h * dir);
                }
            }
            k[s] = f(x + C[s] * h * dir, &ys)?;
        }
        let mut y5 = y;
        let mut err = 0.0f64;
        for c in 0..2 {
            let mut e = Complex64::new(0.0, 0.0);
            for s in 0..7 {
                y5[c] += k[s][c] * (B5[s] * h * dir);
                e += k[s][c] * ((B5[s] - B4[s]) * h * dir);
            }
            let sc = tol * (1.0 + y[c].norm().max(y5[c].norm()));
            err = err.max(e.norm() / sc);
        }
        if err <= 1.0 {
            x += h * dir;
            y = y5;
            k[0] = k[6];
            accepted += 1;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h < 1e-14 * (1.0 + x.abs()) {
            return Err(OracleError::StiffIntegration { x, h });
        }
    }
    Err(OracleError::StiffIntegration { x, h })
}

/// Far boundary of the scattering integration, where `|V|` is below
/// about `1e-14 kappa_1^2`.
pub fn scattering_far_field(spec: &ValidatedSpec) -> f64 {
    let shift = spec.taus().iter().fold(0.0f64, |m, t| m.max(t.abs()));
    shift + 18.0 / kappa1(spec)
}

/// Transmission and reflection amplitudes by integrating the
/// Schroedinger equation from the right boundary, where the state is a
/// pure `exp(ikx)`, back to the left one.
pub fn scattering_oracle(spec: &ValidatedSpec, k: f64) -> Result<Scattering, OracleError> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(OracleError::Precondition(format!("k = {k} must be positive")));
    }
    let chain = Chain::new(spec.clone());
    let x_far = scattering_far_field(spec);
    let ik = Complex64::new(0.0, k);
    let start = Complex64::from_polar(1.0, k * x_far);
    let rhs = |x: f64, y: &State| -> Result<State, OracleError> {
        let v = chain.potential(x)?;
        Ok([y[1], y[0] * (v - k * k)])
    };
    let run = |h0: f64| dopri5(rhs, x_far, [start, ik * start], -x_far, 1e-10, h0, 2_000_000);
    let (y, steps) = match run(0.01 / k.max(kappa1(spec))) {
        Err(OracleError::StiffIntegration { .. }) => run(1e-4 / k.max(kappa1(spec)))?,
        other => other?,
    };
    let (psi, dpsi) = (y[0], y[1] / ik);
    let x = -x_far;
    let a = (psi + dpsi) * Complex64::from_polar(0.5, -k * x);
    let b = (psi - dpsi) * Complex64::from_polar(0.5, k * x);
    Ok(Scattering { t: a.inv(), r: b / a, x_far, steps })
}

/// Taylor jet of `x phi_j(x)` for seed `j`.
fn x_times_seed(spec: &ValidatedSpec, j: usize, x: f64, order: usize) -> Result<Jet<Complex64>, OracleError> {
    let seed = seed_jet(spec.kind(j), spec.kappa(j), spec.tau(j), x, order).map_err(SolitonError::from)?;
    let mut c = vec![0.0; order + 1];
    c[0] = x;
    if order >= 1 {
        c[1] = 1.0;
    }
    Ok(seed.mul(&Jet::from_taylor(x, c)).map_err(SolitonError::from)?.to_complex())
}

/// `max_x |Z f(x)| / max(T(x), 1e-3 max T)` with `T(x) = sum_m |c_m(x) f^(m)(x)|`:
/// at each point, the size of `Z f` against the terms that cancel in it.
fn annihilation(z: &Op, f: &dyn Fn(f64) -> Result<Jet<Complex64>, OracleError>, points: &[f64]) -> Result<(f64, f64), OracleError> {
    let mut rows = Vec::with_capacity(points.len());
    for &x in points {
        let jet = f(x)?;
        let zf = z.apply_jet(&jet)?.value().norm();
        let terms: f64 = z.symbol(x)?.iter().enumerate().map(|(m, c)| c.norm() * jet.derivative_value(m).norm()).sum();
        rows.push((x, zf, terms));
    }
    let floor = 1e-3 * rows.iter().map(|r| r.2).fold(0.0, f64::max);
    let mut worst = (0.0f64, 0.0f64);
    for (x, zf, terms) in rows {
        let d = terms.max(floor);
        let r = if d > 0.0 { zf / d } else { zf };
        if r > worst.0 {
            worst = (r, x);
        }
    }
    Ok(worst)
}

pub const KERNEL_TOL: f64 = 1e-8;

/// The `2n + 1` functions annihilated by `Z_(2n+1)`: the bound states, the
/// edge state `A_n 1`, and `A_n (x phi_j)` for each seed `phi_j`.
pub fn kernel_suite(spec: &ValidatedSpec) -> Result<ResidualReport, OracleError> {
    let z = lax_z(spec);
    let a = compose_a(spec);
    let order = z.order();
    let half = 8.0 / kappa1(spec);
    let grid = standard_grid(kappa1(spec), &z.poles(-half, half));
    let mut per = Vec::new();
    let mut push = |name: String, f: &dyn Fn(f64) -> Result<Jet<Complex64>, OracleError>| -> Result<(), OracleError> {
        let (r, x) = annihilation(&z, f, &grid.points)?;
        per.push(FunctionResidual { function: name, residual: r, worst_point: x });
        Ok(())
    };
    for j in 1..=spec.n() {
        push(format!("bound({j})"), &|x| Ok(bound_state(spec, j, x, order)?.to_complex()))?;
    }
    push("edge".into(), &|x| Ok(scatter_state(spec, 0.0, Direction::Right, x, order)?))?;
    for j in 1..=spec.n() {
        push(format!("partner({j})"), &|x| {
            let g = x_times_seed(spec, j, x, order + a.order())?;
            Ok(a.apply_jet(&g)?.truncate(order))
        })?;
    }
    let skipped = grid
        .skipped
        .iter()
        .map(|&x| SkippedPoint { x, function: "all".into(), reason: "near a coefficient pole".into() })
        .collect();
    Ok(ResidualReport::from_parts("KERNEL", per, skipped, KERNEL_TOL))
}

/// Fixed 8-point Gauss-Legendre nodes and weights on `[-1, 1]`.
const GL_X: [f64; 4] = [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
const GL_W: [f64; 4] = [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];

fn gauss_legendre<F: Fn(f64) -> Result<f64, OracleError>>(f: &F, a: f64, b: f64, panels: usize) -> Result<f64, OracleError> {
    let h = (b - a) / panels as f64;
    let mut s = 0.0;
    for p in 0..panels {
        let (mid, half) = (a + (p as f64 + 0.5) * h, 0.5 * h);
        for (x, w) in GL_X.iter().zip(GL_W) {
            s += w * half * (f(mid - half * x)? + f(mid + half * x)?);
        }
    }
    Ok(s)
}

/// Action of `Z` on the quadrature partner
/// `psi~_j = psi_j int_{x0}^x dy / psi_j^2`, with `x0 = argmax |psi_j|`.
/// The partner is not annihilated: `Z` maps it onto a multiple of `psi_j`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartnerImage {
    pub j: usize,
    pub x0: f64,
    /// Same measure as the kernel suite; of order one here.
    pub annihilation: f64,
    /// Least-squares `c_j` in `Z psi~_j = c_j psi_j`, for the unnormalized
    /// `psi_j` of [`bound_state`].
    pub coefficient: f64,
    /// `max |Z psi~ - c psi| / max |Z psi~|`.
    pub misfit: f64,
}

fn argmax_abs(f: &dyn Fn(f64) -> Result<f64, OracleError>, lo: f64, hi: f64, step: f64) -> Result<f64, OracleError> {
    let mut best = (lo, f64::NEG_INFINITY);
    let mut x = lo;
    while x <= hi {
        let v = f(x)?.abs();
        if v > best.1 {
            best = (x, v);
        }
        x += step;
    }
    Ok(best.0)
}

pub fn quadrature_partners(spec: &ValidatedSpec) -> Result<Vec<PartnerImage>, OracleError> {
    let z = lax_z(spec);
    let order = z.order();
    let half = 8.0 / kappa1(spec);
    let grid = standard_grid(kappa1(spec), &z.poles(-half, half));
    let mut out = Vec::new();
    for j in 1..=spec.n() {
        let psi = |x: f64| -> Result<f64, OracleError> { Ok(bound_state(spec, j, x, 0)?.value()) };
        let x0 = argmax_abs(&psi, -half, half, 0.01 / spec.kappa(j))?;
        let inv2 = |y: f64| psi(y).map(|p| 1.0 / (p * p));
        let tilde = |x: f64| -> Result<Jet<Complex64>, OracleError> {
            let panels = ((x - x0).abs() * spec.kappa(j) / 0.02).ceil().max(1.0) as usize;
            let integral = gauss_legendre(&inv2, x0, x, panels)?;
            let p = bound_state(spec, j, x, order)?;
            let g = p.recip().map_err(SolitonError::from)?;
            let g = g.mul(&g).map_err(SolitonError::from)?;
            let mut c = vec![integral];
            c.extend((1..=order).map(|m| g.taylor(m - 1) / m as f64));
            Ok(p.mul(&Jet::from_taylor(x, c)).map_err(SolitonError::from)?.to_complex())
        };
        let (annihilation, _) = annihilation(&z, &tilde, &grid.points)?;
        let (mut num, mut den) = (0.0, 0.0);
        let mut pairs = Vec::new();
        for &x in &grid.points {
            let zt = z.apply_jet(&tilde(x)?)?.value().re;
            let pv = psi(x)?;
            num += zt * pv;
            den += pv * pv;
            pairs.push((zt, pv));
        }
        let c = num / den;
        let scale = pairs.iter().map(|(zt, _)| zt.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let misfit = pairs.iter().map(|(zt, pv)| (zt - c * pv).abs()).fold(0.0, f64::max) / scale;
        out.push(PartnerImage { j, x0, annihilation, coefficient: c, misfit });
    }
    Ok(out)
}
