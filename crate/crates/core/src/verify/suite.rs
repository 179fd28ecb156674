use crate::diffop::DiffError;
use crate::numkern::{gaussian_packet, Jet};
use crate::soliton::{bound_state, scatter_state, Direction, ValidatedSpec};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

pub const DEFAULT_SEED: u64 = 0xDA4B;
pub const GRID_POINTS: usize = 41;
/// Grid points closer than this many `1/kappa_1` to a declared pole are skipped.
pub const POLE_EXCLUSION: f64 = 0.1;

pub type JetFn = dyn Fn(f64, usize) -> Result<Jet<Complex64>, DiffError> + Send + Sync;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Family {
    GaussianPacket { center: f64, width: f64, momentum: f64 },
    BoundState { seed: usize },
    ScatterState { k: f64 },
}

/// A test function: its family descriptor and its jet evaluator.
#[derive(Clone)]
pub struct TestFunction {
    pub family: Family,
    pub eval: Arc<JetFn>,
}

impl std::fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.family.fmt(f)
    }
}

/// Anything the residual engine can name in a report.
pub trait Labeled {
    fn label(&self) -> String;
}

impl Labeled for TestFunction {
    fn label(&self) -> String {
        TestFunction::label(self)
    }
}

impl TestFunction {
    pub fn label(&self) -> String {
        match &self.family {
            Family::GaussianPacket { center, width, momentum } => {
                format!("packet(c={center:.3},w={width:.3},k={momentum:.3})")
            }
            Family::BoundState { seed } => format!("bound({seed})"),
            Family::ScatterState { k } => format!("scatter({k})"),
        }
    }

    pub fn packet(center: f64, width: f64, momentum: f64) -> Self {
        TestFunction {
            family: Family::GaussianPacket { center, width, momentum },
            eval: Arc::new(move |x, order| Ok(gaussian_packet(center, width, momentum, x, order))),
        }
    }

    pub fn bound(spec: &ValidatedSpec, seed: usize) -> Self {
        let s = spec.clone();
        TestFunction {
            family: Family::BoundState { seed },
            eval: Arc::new(move |x, order| Ok(bound_state(&s, seed, x, order)?.to_complex())),
        }
    }

    pub fn scatter(spec: &ValidatedSpec, k: f64) -> Self {
        let s = spec.clone();
        TestFunction {
            family: Family::ScatterState { k },
            eval: Arc::new(move |x, order| Ok(scatter_state(&s, k, Direction::Right, x, order)?)),
        }
    }

    pub fn jet(&self, x: f64, order: usize) -> Result<Jet<Complex64>, DiffError> {
        (self.eval)(x, order)
    }
}

/// `count` packets with centers in `[-3, 3]/kappa_1`, widths in
/// `[0.5, 2]/kappa_1` and momenta in `[0, 3 kappa_n]`.
pub fn packet_suite(kappa1: f64, kappa_n: f64, seed: u64, count: usize) -> Vec<TestFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let c = rng.gen_range(-3.0..=3.0) / kappa1;
            let w = rng.gen_range(0.5..=2.0) / kappa1;
            let k = rng.gen_range(0.0..=3.0 * kappa_n);
            TestFunction::packet(c, w, k)
        })
        .collect()
}

/// The default suite: eight packets scaled to `spec` plus its bound states.
pub fn default_suite(spec: &ValidatedSpec) -> Vec<TestFunction> {
    let (k1, kn) = (
        spec.kappas().first().copied().unwrap_or(1.0),
        spec.kappas().last().copied().unwrap_or(1.0),
    );
    let mut v = packet_suite(k1, kn, DEFAULT_SEED, 8);
    v.extend((1..=spec.n()).map(|j| TestFunction::bound(spec, j)));
    v
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Grid {
    pub points: Vec<f64>,
    pub skipped: Vec<f64>,
}

/// Chebyshev-Gauss nodes on `[-half, half]`, minus those within
/// `exclusion` of a pole.
pub fn chebyshev_grid(half: f64, count: usize, poles: &[f64], exclusion: f64) -> Grid {
    let mut points = Vec::with_capacity(count);
    let mut skipped = Vec::new();
    for i in 0..count {
        let x = -half * ((2 * i + 1) as f64 * PI / (2 * count) as f64).cos();
        if poles.iter().any(|p| (x - p).abs() < exclusion) {
            skipped.push(x);
        } else {
            points.push(x);
        }
    }
    Grid { points, skipped }
}

/// 41 nodes over `[-8/kappa_1, 8/kappa_1]`.
pub fn standard_grid(kappa1: f64, poles: &[f64]) -> Grid {
    chebyshev_grid(8.0 / kappa1, GRID_POINTS, poles, POLE_EXCLUSION / kappa1)
}

/// A two-component test function; a missing component is zero.
#[derive(Clone, Debug)]
pub struct TestPair {
    pub top: Option<TestFunction>,
    pub bottom: Option<TestFunction>,
}

impl Labeled for TestPair {
    fn label(&self) -> String {
        let side = |f: &Option<TestFunction>| f.as_ref().map_or("0".to_string(), TestFunction::label);
        format!("({}, {})", side(&self.top), side(&self.bottom))
    }
}

impl TestPair {
    /// Jets of both components; zero components get zero jets.
    pub fn jets(&self, x: f64, order: usize) -> Result<[Jet<Complex64>; 2], DiffError> {
        let side = |f: &Option<TestFunction>| match f {
            Some(f) => f.jet(x, order),
            None => Ok(Jet::zero(x, order)),
        };
        Ok([side(&self.top)?, side(&self.bottom)?])
    }
}

/// Packets paired across the blocks, plus the bound states of each block
/// in its own component.
pub fn pair_suite(upper: &ValidatedSpec, lower: &ValidatedSpec) -> Vec<TestPair> {
    let k1 = upper.kappas().first().copied().unwrap_or(1.0).min(lower.kappas().first().copied().unwrap_or(1.0));
    let kn = upper.kappas().last().copied().unwrap_or(1.0).max(lower.kappas().last().copied().unwrap_or(1.0));
    let packets = packet_suite(k1, kn, DEFAULT_SEED, 8);
    let mut v: Vec<TestPair> = (0..packets.len())
        .map(|i| TestPair { top: Some(packets[i].clone()), bottom: Some(packets[(i + 1) % packets.len()].clone()) })
        .collect();
    v.extend((1..=upper.n()).map(|j| TestPair { top: Some(TestFunction::bound(upper, j)), bottom: None }));
    v.extend((1..=lower.n()).map(|j| TestPair { top: None, bottom: Some(TestFunction::bound(lower, j)) }));
    v
}
