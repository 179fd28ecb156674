//! Explicit two-soliton formulas, kept independent of the chain code so
//! the two can be checked against each other.

use num_complex::Complex64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoSoliton {
    pub k1: f64,
    pub t1: f64,
    pub k2: f64,
    pub t2: f64,
}

impl TwoSoliton {
    pub fn new(kappas: [f64; 2], taus: [f64; 2]) -> Self {
        TwoSoliton { k1: kappas[0], t1: taus[0], k2: kappas[1], t2: taus[1] }
    }

    fn y1(&self, x: f64) -> f64 {
        self.k1 * (x + self.t1)
    }

    fn y2(&self, x: f64) -> f64 {
        self.k2 * (x + self.t2)
    }

    // kappa_2 cosh y2 - kappa_1 tanh y1 sinh y2, divided by cosh y2
    fn den(&self, x: f64) -> f64 {
        self.k2 - self.k1 * self.y1(x).tanh() * self.y2(x).tanh()
    }

    /// `w = (k1^2 - k2^2) / (k2 coth y2 - k1 tanh y1)`, written without the
    /// removable pole of `coth`.
    pub fn w(&self, x: f64) -> f64 {
        (self.k1.powi(2) - self.k2.powi(2)) * self.y2(x).tanh() / self.den(x)
    }

    /// `V_2 = -2 (k2^2 csch^2 y2 + k1^2 sech^2 y1) w^2 / (k2^2 - k1^2)`.
    pub fn potential(&self, x: f64) -> f64 {
        let g = self.k2.powi(2) - self.k1.powi(2);
        // csch^2 y2 w^2 = g^2 sech^2 y2 / den^2
        let c2w2 = g * g / (self.y2(x).cosh().powi(2) * self.den(x).powi(2));
        let s1w2 = self.w(x).powi(2) / self.y1(x).cosh().powi(2);
        -2.0 * (self.k2.powi(2) * c2w2 + self.k1.powi(2) * s1w2) / g
    }

    /// Bound state of energy `-k1^2`: `k1 sech y1 w`.
    pub fn ground(&self, x: f64) -> f64 {
        self.k1 * self.w(x) / self.y1(x).cosh()
    }

    /// Bound state of energy `-k2^2`: `-k2 csch y2 w`.
    pub fn excited(&self, x: f64) -> f64 {
        let g = self.k1.powi(2) - self.k2.powi(2);
        -self.k2 * g / (self.y2(x).cosh() * self.den(x))
    }

    /// `[-(k^2 + k1^2) + (+-ik - k1 tanh y1) w] e^{+-ikx}`.
    pub fn scattering(&self, k: f64, sign: f64, x: f64) -> Complex64 {
        let amp = Complex64::new(-(k * k + self.k1.powi(2)), 0.0)
            + Complex64::new(-self.k1 * self.y1(x).tanh(), sign * k) * self.w(x);
        amp * Complex64::from_polar(1.0, sign * k * x)
    }
}
