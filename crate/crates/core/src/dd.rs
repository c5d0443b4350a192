//! Double-double arithmetic: an unevaluated sum `hi + lo` carrying about 32 digits.
//!
//! Only the handful of operations the series evaluator needs are provided.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

const LN2: Dd = Dd { hi: std::f64::consts::LN_2, lo: 2.3190468138462996e-17 };
const HALF_LN_2PI: Dd = Dd { hi: 0.9189385332046728, lo: -3.8782941580672414e-17 };

/// B_{2j} / (2j (2j-1)) for j = 1..14.
const STIRLING: [Dd; 14] = [
    Dd { hi: 0.08333333333333333, lo: 4.625929269271485e-18 },
    Dd { hi: -0.002777777777777778, lo: 1.0601087908747154e-19 },
    Dd { hi: 0.0007936507936507937, lo: 6.883823317368282e-22 },
    Dd { hi: -0.0005952380952380953, lo: 5.36938218754726e-20 },
    Dd { hi: 0.0008417508417508417, lo: 3.6870174889237694e-20 },
    Dd { hi: -0.0019175269175269176, lo: 1.0675702776872475e-19 },
    Dd { hi: 0.00641025641025641, lo: 2.2240044563805217e-19 },
    Dd { hi: -0.029550653594771242, lo: 4.861760957508855e-19 },
    Dd { hi: 0.17964437236883057, lo: -6.401600482710946e-19 },
    Dd { hi: -1.3924322169059011, lo: 1.5837056989230303e-17 },
    Dd { hi: 13.402864044168393, lo: -6.154114101993966e-16 },
    Dd { hi: -156.84828462600203, lo: 9.391823141715389e-15 },
    Dd { hi: 2193.1033333333335, lo: -1.3339255626002948e-13 },
    Dd { hi: -36108.77125372499, lo: 5.897583353514365e-13 },
];

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact `a * k + b` (k is converted exactly as long as it is below 2^53).
    pub fn affine(a: f64, k: f64, b: f64) -> Self {
        let (p, pe) = two_prod(a, k);
        let (s, se) = two_sum(p, b);
        let (hi, lo) = quick_two_sum(s, se + pe);
        Dd { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Dd { hi, lo }
    }

    pub fn sqr(self) -> Self {
        self * self
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.0 {
            return Dd::new(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        // x = k ln2 + r, then r / 2^10 through Taylor and square back.
        let k = (self.hi / LN2.hi).round();
        let r = self - LN2.mul_f64(k);
        let r = r.mul_f64(1.0 / 1024.0);
        let mut term = r;
        let mut sum = r;
        for n in 2..=20 {
            term = (term * r) / Dd::new(n as f64);
            sum = sum + term;
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        // expm1 squaring: (1+s)^2 - 1 = s(2+s)
        for _ in 0..10 {
            sum = sum * (sum + Dd::new(2.0));
        }
        let e = sum + Dd::ONE;
        let s = 2f64.powi(k as i32);
        Dd { hi: e.hi * s, lo: e.lo * s }
    }

    /// Natural logarithm for positive arguments (two Newton steps from f64).
    pub fn ln(self) -> Self {
        let mut y = Dd::new(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - Dd::ONE;
        }
        y
    }

    /// ln Gamma(x) for x >= 40 by Stirling's series.
    fn ln_gamma_large(x: Dd) -> Dd {
        let inv = Dd::ONE / x;
        let inv2 = inv.sqr();
        let mut corr = Dd::ZERO;
        let mut p = inv;
        for c in STIRLING.iter() {
            corr = corr + *c * p;
            p = p * inv2;
        }
        (x - Dd::new(0.5)) * x.ln() - x + HALF_LN_2PI + corr
    }

    /// 1/Gamma(x) for any real `x`, exactly zero at the poles.
    pub fn recip_gamma(x: Dd) -> Dd {
        // 1/Gamma(x) = x (x+1) ... (x+m-1) / Gamma(x+m)
        let mut prod = Dd::ONE;
        let mut y = x;
        while y.hi < 40.0 {
            prod = prod * y;
            y = y + Dd::ONE;
        }
        if prod.hi == 0.0 {
            return Dd::ZERO;
        }
        let lg = Self::ln_gamma_large(y);
        prod * (-lg).exp()
    }

    /// ln |Gamma(x)| for x > 0.
    pub fn ln_gamma(x: Dd) -> Dd {
        let mut shift = Dd::ZERO;
        let mut y = x;
        let mut prod = Dd::ONE;
        while y.hi < 40.0 {
            prod = prod * y;
            y = y + Dd::ONE;
            if prod.hi > 1e250 {
                shift = shift + prod.ln();
                prod = Dd::ONE;
            }
        }
        Self::ln_gamma_large(y) - shift - prod.ln()
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::new(x)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::new(q3)
    }
}

/// Complex number with double-double parts.
#[derive(Clone, Copy, Debug, Default)]
pub struct CDd {
    pub re: Dd,
    pub im: Dd,
}

impl CDd {
    pub const ZERO: CDd = CDd { re: Dd::ZERO, im: Dd::ZERO };

    pub fn from_f64(re: f64, im: f64) -> Self {
        CDd { re: Dd::new(re), im: Dd::new(im) }
    }

    pub fn scale(self, s: Dd) -> Self {
        CDd { re: self.re * s, im: self.im * s }
    }

    pub fn norm_f64(self) -> f64 {
        self.re.hi.hypot(self.im.hi)
    }

    pub fn to_c64(self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

impl Add for CDd {
    type Output = CDd;
    fn add(self, b: CDd) -> CDd {
        CDd { re: self.re + b.re, im: self.im + b.im }
    }
}

impl Mul for CDd {
    type Output = CDd;
    fn mul(self, b: CDd) -> CDd {
        CDd { re: self.re * b.re - self.im * b.im, im: self.re * b.im + self.im * b.re }
    }
}
