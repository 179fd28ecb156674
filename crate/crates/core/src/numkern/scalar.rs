use num_complex::Complex64;
use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

/// Field element a jet can carry: `f64` for real pipelines, `Complex64` for
/// plane waves and packets.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_real(x: f64) -> Self;
    fn abs(self) -> f64;
    fn scale(self, s: f64) -> Self;
    fn conj(self) -> Self;
    fn re(self) -> f64;
    /// Splits `exp(self)` into `(re(self), exp(i im(self)))` so the modulus
    /// can go into a log-scale.
    fn split_exp(self) -> (f64, Self);
    fn to_complex(self) -> Complex64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_real(x: f64) -> Self {
        x
    }
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn conj(self) -> Self {
        self
    }
    fn re(self) -> f64 {
        self
    }
    fn split_exp(self) -> (f64, Self) {
        (self, 1.0)
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn abs(self) -> f64 {
        self.norm()
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn re(self) -> f64 {
        self.re
    }
    fn split_exp(self) -> (f64, Self) {
        (self.re, Complex64::from_polar(1.0, self.im))
    }
    fn to_complex(self) -> Complex64 {
        self
    }
}
