use super::scalar::Scalar;
use super::NumError;
use num_complex::Complex64;
use std::f64::consts::LN_2;

/// A number stored as `phase * exp(log_mag)`. Survives values like
/// `cosh(800)` that overflow `f64`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledValue<T> {
    pub phase: T,
    pub log_mag: f64,
}

impl<T: Scalar> ScaledValue<T> {
    pub fn from_value(v: T) -> Self {
        let m = v.abs();
        if m == 0.0 {
            ScaledValue { phase: T::zero(), log_mag: f64::NEG_INFINITY }
        } else {
            ScaledValue { phase: v.scale(1.0 / m), log_mag: m.ln() }
        }
    }

    pub fn value(&self) -> T {
        if self.log_mag == f64::NEG_INFINITY {
            return T::zero();
        }
        self.phase.scale(self.log_mag.exp())
    }

    pub fn is_zero(&self) -> bool {
        self.log_mag == f64::NEG_INFINITY
    }
}

/// Truncated Taylor expansion at `point`:
/// `f(point + h) = exp(log_scale) * sum_m coeffs[m] h^m`.
///
/// Coefficients are kept normalized so that the largest modulus lies in
/// `[1, 2)`; the magnitude lives in `log_scale`. Normalization uses exact
/// powers of two, so it never perturbs the digits.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet<T> {
    point: f64,
    log_scale: f64,
    coeffs: Vec<T>,
}

impl<T: Scalar> Jet<T> {
    /// Builds a jet from raw Taylor coefficients (`f^(m)/m!`) times
    /// `exp(log_scale)`.
    pub fn from_parts(point: f64, log_scale: f64, coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "jet needs at least the value coefficient");
        let mut j = Jet { point, log_scale, coeffs };
        j.renormalize();
        j
    }

    pub fn from_taylor(point: f64, coeffs: Vec<T>) -> Self {
        Self::from_parts(point, 0.0, coeffs)
    }

    pub fn zero(point: f64, order: usize) -> Self {
        Jet { point, log_scale: f64::NEG_INFINITY, coeffs: vec![T::zero(); order + 1] }
    }

    pub fn constant(point: f64, value: T, order: usize) -> Self {
        let mut c = vec![T::zero(); order + 1];
        c[0] = value;
        Self::from_taylor(point, c)
    }

    /// Jet of `(x - point)^m / m!`; the probe used for coefficient extraction.
    pub fn monomial(point: f64, m: usize, order: usize) -> Self {
        assert!(m <= order);
        let mut c = vec![T::zero(); order + 1];
        let mut fact = 1.0;
        for i in 2..=m {
            fact *= i as f64;
        }
        c[m] = T::from_real(1.0 / fact);
        Self::from_taylor(point, c)
    }

    pub fn point(&self) -> f64 {
        self.point
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    /// Normalized coefficients; multiply by `exp(log_scale)` for actual values.
    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.log_scale == f64::NEG_INFINITY
    }

    /// Actual Taylor coefficient `f^(m)(point)/m!`.
    pub fn taylor(&self, m: usize) -> T {
        if self.is_zero() {
            return T::zero();
        }
        self.coeffs[m].scale(self.log_scale.exp())
    }

    pub fn value(&self) -> T {
        self.taylor(0)
    }

    pub fn scaled_value(&self) -> ScaledValue<T> {
        let c = self.coeffs[0];
        let m = c.abs();
        if self.is_zero() || m == 0.0 {
            return ScaledValue { phase: T::zero(), log_mag: f64::NEG_INFINITY };
        }
        ScaledValue { phase: c.scale(1.0 / m), log_mag: m.ln() + self.log_scale }
    }

    /// `f^(m)(point)`.
    pub fn derivative_value(&self, m: usize) -> T {
        let mut fact = 1.0;
        for i in 2..=m {
            fact *= i as f64;
        }
        self.taylor(m).scale(fact)
    }

    pub fn truncate(&self, order: usize) -> Self {
        if order >= self.order() {
            return self.clone();
        }
        let mut j = Jet {
            point: self.point,
            log_scale: self.log_scale,
            coeffs: self.coeffs[..=order].to_vec(),
        };
        j.renormalize();
        j
    }

    fn renormalize(&mut self) {
        let max = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if max == 0.0 || self.log_scale == f64::NEG_INFINITY {
            self.log_scale = f64::NEG_INFINITY;
            for c in &mut self.coeffs {
                *c = T::zero();
            }
            return;
        }
        if !max.is_finite() {
            return;
        }
        let e = max.log2().floor() as i32;
        if e != 0 {
            let f = 2f64.powi(-e);
            for c in &mut self.coeffs {
                *c = c.scale(f);
            }
            self.log_scale += e as f64 * LN_2;
        }
    }

    fn check_point(&self, other_point: f64) -> Result<(), NumError> {
        if self.point != other_point {
            return Err(NumError::PointMismatch { left: self.point, right: other_point });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, NumError> {
        self.check_point(other.point)?;
        let order = self.order().min(other.order());
        if other.is_zero() {
            return Ok(self.truncate(order));
        }
        if self.is_zero() {
            return Ok(other.truncate(order));
        }
        let l = self.log_scale.max(other.log_scale);
        let fa = (self.log_scale - l).exp();
        let fb = (other.log_scale - l).exp();
        let coeffs = (0..=order)
            .map(|m| self.coeffs[m].scale(fa) + other.coeffs[m].scale(fb))
            .collect();
        Ok(Self::from_parts(self.point, l, coeffs))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, NumError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Jet {
            point: self.point,
            log_scale: self.log_scale,
            coeffs: self.coeffs.iter().map(|&c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, NumError> {
        self.check_point(other.point)?;
        let order = self.order().min(other.order());
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.point, order));
        }
        let mut out = vec![T::zero(); order + 1];
        for (i, &a) in self.coeffs.iter().take(order + 1).enumerate() {
            for (j, &b) in other.coeffs.iter().take(order + 1 - i).enumerate() {
                out[i + j] += a * b;
            }
        }
        Ok(Self::from_parts(self.point, self.log_scale + other.log_scale, out))
    }

    /// Multiplies by a real jet (operator coefficients are real).
    pub fn mul_real(&self, other: &Jet<f64>) -> Result<Self, NumError> {
        self.mul(&Jet::promote(other))
    }

    /// Lifts a real jet into this scalar type.
    pub fn promote(real: &Jet<f64>) -> Self {
        Jet {
            point: real.point,
            log_scale: real.log_scale,
            coeffs: real.coeffs.iter().map(|&c| T::from_real(c)).collect(),
        }
    }

    pub fn scale_by(&self, s: T) -> Self {
        if s.abs() == 0.0 {
            return Self::zero(self.point, self.order());
        }
        Self::from_parts(
            self.point,
            self.log_scale,
            self.coeffs.iter().map(|&c| c * s).collect(),
        )
    }

    pub fn add_constant(&self, s: T) -> Result<Self, NumError> {
        self.add(&Self::constant(self.point, s, self.order()))
    }

    pub fn derivative(&self) -> Result<Self, NumError> {
        if self.order() == 0 {
            return Err(NumError::OrderExhausted { needed: 1, available: 0 });
        }
        if self.is_zero() {
            return Ok(Self::zero(self.point, self.order() - 1));
        }
        let coeffs = (1..=self.order())
            .map(|m| self.coeffs[m].scale(m as f64))
            .collect();
        Ok(Self::from_parts(self.point, self.log_scale, coeffs))
    }

    pub fn recip(&self) -> Result<Self, NumError> {
        let a0 = self.coeffs[0];
        if self.is_zero() || a0.abs() == 0.0 {
            return Err(NumError::ZeroBase { point: self.point });
        }
        let n = self.order();
        let mut b = vec![T::zero(); n + 1];
        b[0] = T::one() / a0;
        for m in 1..=n {
            let mut s = T::zero();
            for k in 1..=m {
                s += self.coeffs[k] * b[m - k];
            }
            b[m] = -(s / a0);
        }
        Ok(Self::from_parts(self.point, -self.log_scale, b))
    }

    pub fn div(&self, other: &Self) -> Result<Self, NumError> {
        self.mul(&other.recip()?)
    }

    /// `f'/f`, computed by series division so the log-scale cancels exactly.
    pub fn log_derivative(&self) -> Result<Self, NumError> {
        let a0 = self.coeffs[0];
        if self.is_zero() || a0.abs() == 0.0 {
            return Err(NumError::ZeroBase { point: self.point });
        }
        let n = self.order();
        if n == 0 {
            return Err(NumError::OrderExhausted { needed: 1, available: 0 });
        }
        let mut q = vec![T::zero(); n];
        for m in 0..n {
            let mut s = self.coeffs[m + 1].scale((m + 1) as f64);
            for k in 1..=m {
                s = s - self.coeffs[k] * q[m - k];
            }
            q[m] = s / a0;
        }
        Ok(Self::from_parts(self.point, 0.0, q))
    }

    /// `exp(f)`; the real part of the value goes straight into the log-scale.
    pub fn exp(&self) -> Self {
        let n = self.order();
        let g: Vec<T> = (0..=n).map(|m| self.taylor(m)).collect();
        let (log0, phase0) = g[0].split_exp();
        let mut e = vec![T::zero(); n + 1];
        e[0] = phase0;
        for m in 1..=n {
            let mut s = T::zero();
            for k in 1..=m {
                s += g[k].scale(k as f64) * e[m - k];
            }
            e[m] = s.scale(1.0 / m as f64);
        }
        Self::from_parts(self.point, log0, e)
    }

    pub fn to_complex(&self) -> Jet<Complex64> {
        Jet {
            point: self.point,
            log_scale: self.log_scale,
            coeffs: self.coeffs.iter().map(|c| c.to_complex()).collect(),
        }
    }

    /// Largest actual coefficient modulus, as a natural log.
    pub fn log_max_coeff(&self) -> f64 {
        let m = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        m.ln() + self.log_scale
    }
}

impl Jet<Complex64> {
    pub fn re(&self) -> Jet<f64> {
        Jet::from_parts(self.point, self.log_scale, self.coeffs.iter().map(|c| c.re).collect())
    }
}
