use crate::diffop::{DiffError, Op};
use crate::numkern::Jet;
use num_complex::Complex64;
use serde::Serialize;

/// Grading of a matrix operator under `Gamma = sigma_3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
    Zero,
}

/// 2x2 matrix of scalar operators; `None` entries are zero.
#[derive(Clone, Debug)]
pub struct MatrixOp {
    pub entries: [[Option<Op>; 2]; 2],
}

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

impl MatrixOp {
    pub fn zero() -> Self {
        MatrixOp { entries: [[None, None], [None, None]] }
    }

    pub fn diag(a: Op, b: Op) -> Self {
        MatrixOp { entries: [[Some(a), None], [None, Some(b)]] }
    }

    pub fn antidiag(top_right: Op, bottom_left: Op) -> Self {
        MatrixOp { entries: [[None, Some(top_right)], [Some(bottom_left), None]] }
    }

    pub fn scalar(c: Complex64) -> Self {
        Self::diag(Op::scalar(c), Op::scalar(c))
    }

    pub fn identity() -> Self {
        Self::scalar(Complex64::new(1.0, 0.0))
    }

    pub fn sigma1() -> Self {
        Self::antidiag(Op::identity(), Op::identity())
    }

    pub fn sigma2() -> Self {
        Self::antidiag(Op::scalar(-I), Op::scalar(I))
    }

    pub fn sigma3() -> Self {
        Self::diag(Op::identity(), Op::real(-1.0))
    }

    /// `[[0, T], [T^dagger, 0]]`.
    pub fn supercharge(t: &Op) -> Self {
        Self::antidiag(t.clone(), t.adjoint())
    }

    /// The pair `(M, i sigma_3 M)`.
    pub fn graded_pair(first: MatrixOp) -> [MatrixOp; 2] {
        let second = Self::sigma3().mul(&first).scale_c(I);
        [first, second]
    }

    pub fn entry(&self, i: usize, j: usize) -> Option<&Op> {
        self.entries[i][j].as_ref()
    }

    pub fn order(&self) -> usize {
        self.entries.iter().flatten().flatten().map(Op::order).max().unwrap_or(0)
    }

    pub fn parity(&self) -> Parity {
        let diag = self.entries[0][0].is_some() || self.entries[1][1].is_some();
        let off = self.entries[0][1].is_some() || self.entries[1][0].is_some();
        match (diag, off) {
            (false, false) => Parity::Zero,
            (true, false) => Parity::Even,
            (false, true) => Parity::Odd,
            (true, true) => Parity::Mixed,
        }
    }

    /// `self * other`: `other` acts first.
    pub fn mul(&self, other: &MatrixOp) -> MatrixOp {
        let mut out = MatrixOp::zero();
        for i in 0..2 {
            for j in 0..2 {
                let terms: Vec<Op> = (0..2)
                    .filter_map(|k| match (&self.entries[i][k], &other.entries[k][j]) {
                        (Some(a), Some(b)) => Some(a.then(b)),
                        _ => None,
                    })
                    .collect();
                out.entries[i][j] = join(terms);
            }
        }
        out
    }

    pub fn add(&self, other: &MatrixOp) -> MatrixOp {
        let mut out = MatrixOp::zero();
        for i in 0..2 {
            for j in 0..2 {
                let terms = [&self.entries[i][j], &other.entries[i][j]].into_iter().flatten().cloned().collect();
                out.entries[i][j] = join(terms);
            }
        }
        out
    }

    pub fn sub(&self, other: &MatrixOp) -> MatrixOp {
        self.add(&other.scale(-1.0))
    }

    pub fn scale_c(&self, s: Complex64) -> MatrixOp {
        let mut out = self.clone();
        for e in out.entries.iter_mut().flatten().flatten() {
            *e = e.scale_c(s);
        }
        out
    }

    pub fn scale(&self, s: f64) -> MatrixOp {
        self.scale_c(Complex64::new(s, 0.0))
    }

    /// Transpose with every entry replaced by its formal adjoint.
    pub fn adjoint(&self) -> MatrixOp {
        let mut out = MatrixOp::zero();
        for i in 0..2 {
            for j in 0..2 {
                out.entries[j][i] = self.entries[i][j].as_ref().map(Op::adjoint);
            }
        }
        out
    }

    pub fn anticommutator(a: &MatrixOp, b: &MatrixOp) -> MatrixOp {
        a.mul(b).add(&b.mul(a))
    }

    pub fn commutator(a: &MatrixOp, b: &MatrixOp) -> MatrixOp {
        a.mul(b).sub(&b.mul(a))
    }

    pub fn poles(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut out: Vec<f64> = self.entries.iter().flatten().flatten().flat_map(|e| e.poles(lo, hi)).collect();
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        out
    }

    /// Values of both components of the action on `(f_top, f_bottom)`.
    pub fn apply_jets(&self, f: &[Jet<Complex64>; 2]) -> Result<[Complex64; 2], DiffError> {
        let mut out = [Complex64::new(0.0, 0.0); 2];
        for (i, row) in self.entries.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                if let Some(e) = e {
                    out[i] += e.apply_jet(&f[j].truncate(e.order()))?.value();
                }
            }
        }
        Ok(out)
    }
}

fn join(mut terms: Vec<Op>) -> Option<Op> {
    match terms.len() {
        0 => None,
        1 => terms.pop(),
        _ => Some(Op::sum(terms)),
    }
}
