use super::spec::ValidatedSpec;
use super::SolitonError;
use crate::numkern::{seed_jet, Jet};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WronskianLog {
    pub sign: f64,
    pub log_w: f64,
    pub dlog_w: f64,
    pub d2log_w: f64,
}

/// `ln |W(psi_1, ..., psi_n)|` and its first two derivatives.
///
/// Each column's common magnitude is pulled out before elimination, so the
/// determinant of the remaining O(1) matrix never overflows.
pub fn wronskian_log(spec: &ValidatedSpec, x: f64) -> Result<WronskianLog, SolitonError> {
    let n = spec.n();
    if n == 0 {
        return Ok(WronskianLog { sign: 1.0, log_w: 0.0, dlog_w: 0.0, d2log_w: 0.0 });
    }
    let mut log_cols = 0.0;
    let mut m: Vec<Vec<Jet<f64>>> = vec![Vec::with_capacity(n); n];
    for j in 1..=n {
        let mut f = seed_jet(spec.kind(j), spec.kappa(j), spec.tau(j), x, n + 1)?;
        let mut col = Vec::with_capacity(n);
        for i in 0..n {
            if i > 0 {
                f = f.derivative()?;
            }
            col.push(f.truncate(2));
        }
        let lc = col.iter().map(|e| e.log_scale()).fold(f64::NEG_INFINITY, f64::max);
        log_cols += lc;
        for (i, e) in col.into_iter().enumerate() {
            m[i].push(Jet::from_parts(x, e.log_scale() - lc, e.coeffs().to_vec()));
        }
    }
    let mut sign = 1.0;
    let mut det = Jet::constant(x, 1.0, 2);
    for k in 0..n {
        let p = (k..n)
            .max_by(|&a, &b| m[a][k].value().abs().partial_cmp(&m[b][k].value().abs()).unwrap())
            .unwrap();
        if p != k {
            m.swap(p, k);
            sign = -sign;
        }
        let pivot = m[k][k].clone();
        det = det.mul(&pivot)?;
        let inv = pivot.recip()?;
        for r in (k + 1)..n {
            let f = m[r][k].mul(&inv)?;
            for c in k..n {
                let t = f.mul(&m[k][c])?;
                m[r][c] = m[r][c].sub(&t)?;
            }
        }
    }
    let sv = det.scaled_value();
    let q = det.log_derivative()?;
    Ok(WronskianLog {
        sign: (sign * sv.phase).signum(),
        log_w: log_cols + sv.log_mag,
        dlog_w: q.taylor(0),
        d2log_w: q.taylor(1),
    })
}

/// Sign of the Wronskian of the seeds in `spec` (0 where it vanishes).
pub fn wronskian_sign(spec: &ValidatedSpec, x: f64) -> f64 {
    match wronskian_log(spec, x) {
        Ok(w) => w.sign,
        Err(_) => 0.0,
    }
}
