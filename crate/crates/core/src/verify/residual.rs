use super::suite::{Grid, Labeled, TestFunction};
use crate::diffop::{DiffError, Op};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

/// Weight of the operator-scale term in the residual denominator.
pub const RESIDUAL_FLOOR: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionResidual {
    pub function: String,
    pub residual: f64,
    pub worst_point: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SkippedPoint {
    pub x: f64,
    pub function: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub id: String,
    pub max_rel_residual: f64,
    pub worst_point: Option<f64>,
    pub worst_function: Option<String>,
    pub per_function: Vec<FunctionResidual>,
    pub skipped: Vec<SkippedPoint>,
    pub threshold: f64,
    pub pass: bool,
}

impl ResidualReport {
    pub fn from_parts(id: &str, per_function: Vec<FunctionResidual>, skipped: Vec<SkippedPoint>, threshold: f64) -> Self {
        let worst = per_function.iter().max_by(|a, b| a.residual.total_cmp(&b.residual));
        let max = worst.map_or(0.0, |w| w.residual);
        ResidualReport {
            id: id.into(),
            max_rel_residual: max,
            worst_point: worst.map(|w| w.worst_point),
            worst_function: worst.map(|w| w.function.clone()),
            skipped,
            threshold,
            pass: max <= threshold && !per_function.is_empty(),
            per_function,
        }
    }

    /// A single scalar residual (no test functions involved).
    pub fn scalar(id: &str, residual: f64, threshold: f64) -> Self {
        let f = FunctionResidual { function: "scalar".into(), residual, worst_point: f64::NAN };
        Self::from_parts(id, vec![f], Vec::new(), threshold)
    }
}

/// Both sides of an identity applied to one test function at one point.
pub struct Sample {
    pub lhs: Vec<Complex64>,
    pub rhs: Vec<Complex64>,
    /// `max |f|` over the components of the test function.
    pub f_abs: f64,
    /// Size of a reference operator applied to `f`, e.g. one product of a
    /// commutator. Only enters the operator scale; zero when unused.
    pub reference: f64,
}

fn max_abs(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

struct Partial {
    function: String,
    num: f64,
    sides: f64,
    reference: f64,
    f_abs: f64,
    worst: f64,
}

/// Per test function: `max_x |L f - R f| / (max |L f| + max |R f| + floor ||f|| s)`
/// where `s = max_g max(max |L g| + max |R g|, max |T g|) / ||g||` is the
/// operator scale seen over the whole suite and `T` an optional reference
/// operator. The floor only matters for functions both
/// sides (nearly) annihilate, where a purely relative measure compares
/// rounding noise with rounding noise.
pub fn evaluate_samples<T, F>(id: &str, fns: &[T], grid: &Grid, threshold: f64, sample: F) -> ResidualReport
where
    T: Labeled + Sync,
    F: Fn(&T, f64) -> Result<Sample, DiffError> + Sync,
{
    let results: Vec<(Option<Partial>, Vec<SkippedPoint>)> = fns
        .par_iter()
        .map(|tf| {
            let mut skipped = Vec::new();
            let (mut num, mut lmax, mut rmax, mut fmax, mut refmax) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
            let mut worst = f64::NAN;
            for &x in &grid.points {
                match sample(tf, x) {
                    Ok(s) => {
                        let dn = s.lhs.iter().zip(&s.rhs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                        if dn > num || worst.is_nan() {
                            num = num.max(dn);
                            worst = x;
                        }
                        lmax = lmax.max(max_abs(&s.lhs));
                        rmax = rmax.max(max_abs(&s.rhs));
                        fmax = fmax.max(s.f_abs);
                        refmax = refmax.max(s.reference);
                    }
                    Err(e) => skipped.push(SkippedPoint { x, function: tf.label(), reason: e.to_string() }),
                }
            }
            let p = (!worst.is_nan()).then(|| Partial { function: tf.label(), num, sides: lmax + rmax, reference: refmax, f_abs: fmax, worst });
            (p, skipped)
        })
        .collect();
    let mut parts = Vec::new();
    let mut skipped = Vec::new();
    for (p, s) in results {
        parts.extend(p);
        skipped.extend(s);
    }
    let scale = parts.iter().filter(|p| p.f_abs > 0.0).map(|p| p.sides.max(p.reference) / p.f_abs).fold(0.0, f64::max);
    let per = parts
        .into_iter()
        .map(|p| FunctionResidual {
            residual: p.num / (p.sides + RESIDUAL_FLOOR * p.f_abs * scale + 1e-300),
            function: p.function,
            worst_point: p.worst,
        })
        .collect();
    ResidualReport::from_parts(id, per, skipped, threshold)
}

/// Residual of the scalar operator identity `lhs = rhs`.
pub fn op_residual(
    id: &str,
    lhs: &Op,
    rhs: &Op,
    fns: &[TestFunction],
    grid: &Grid,
    threshold: f64,
) -> ResidualReport {
    let order = lhs.order().max(rhs.order());
    evaluate_samples(id, fns, grid, threshold, |tf, x| {
        let f = tf.jet(x, order)?;
        let l = lhs.apply_jet(&f.truncate(lhs.order()))?.value();
        let r = rhs.apply_jet(&f.truncate(rhs.order()))?.value();
        Ok(Sample { lhs: vec![l], rhs: vec![r], f_abs: f.value().norm(), reference: 0.0 })
    })
}
