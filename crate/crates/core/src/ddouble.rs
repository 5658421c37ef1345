//! Double-double arithmetic: an unevaluated sum `hi + lo` of two `f64`s,
//! giving roughly 32 significant decimal digits.
//!
//! Divided differences over nodes that coalesce lose about `log10(1/spread^k)`
//! digits to cancellation. Evaluating the function and the difference table
//! in double-double keeps the limit behaviour observable at spreads where
//! plain `f64` has already drowned in round-off.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

const LN2: DoubleDouble = DoubleDouble {
    hi: 6.931_471_805_599_452_862e-1,
    lo: 2.319_046_813_846_299_558e-17,
};

const FRAC_PI_2: DoubleDouble = DoubleDouble {
    hi: 1.570_796_326_794_896_558e0,
    lo: 6.123_233_995_736_766_036e-17,
};

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

impl DoubleDouble {
    pub const ZERO: DoubleDouble = DoubleDouble { hi: 0.0, lo: 0.0 };
    pub const ONE: DoubleDouble = DoubleDouble { hi: 1.0, lo: 0.0 };

    pub fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        DoubleDouble { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    /// Multiplication by an exact power of two.
    fn scale_pow2(self, k: i32) -> Self {
        let s = 2f64.powi(k);
        DoubleDouble { hi: self.hi * s, lo: self.lo * s }
    }

    pub fn powi(self, n: u32) -> Self {
        let mut result = DoubleDouble::ONE;
        let mut base = self;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base;
            }
            base = base * base;
            e >>= 1;
        }
        result
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.0 {
            return DoubleDouble { hi: f64::INFINITY, lo: 0.0 };
        }
        if self.hi < -745.0 {
            return DoubleDouble::ZERO;
        }
        let k = (self.hi / LN2.hi).round();
        let r = self - LN2 * DoubleDouble::from(k);
        // exp(r) = exp(r / 32)^32
        let r = r.scale_pow2(-5);
        let mut sum = DoubleDouble::ONE;
        let mut term = DoubleDouble::ONE;
        for n in 1..40 {
            term = term * r / DoubleDouble::from(n as f64);
            sum = sum + term;
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        for _ in 0..5 {
            sum = sum * sum;
        }
        sum.scale_pow2(k as i32)
    }

    /// Returns `(sin, cos)` of `self`. Accurate for moderate arguments
    /// (|x| up to a few thousand), which covers every use in this crate.
    pub fn sin_cos(self) -> (Self, Self) {
        let k = (self.hi / FRAC_PI_2.hi).round();
        let r = self - FRAC_PI_2 * DoubleDouble::from(k);
        let r2 = r * r;
        let mut sin = r;
        let mut cos = DoubleDouble::ONE;
        let mut s_term = r;
        let mut c_term = DoubleDouble::ONE;
        let mut n = 1.0;
        loop {
            s_term = -(s_term * r2) / DoubleDouble::from((n + 1.0) * (n + 2.0));
            c_term = -(c_term * r2) / DoubleDouble::from(n * (n + 1.0));
            sin = sin + s_term;
            cos = cos + c_term;
            n += 2.0;
            if s_term.hi.abs() < 1e-36 && c_term.hi.abs() < 1e-36 || n > 60.0 {
                break;
            }
        }
        match (k as i64).rem_euclid(4) {
            0 => (sin, cos),
            1 => (cos, -sin),
            2 => (-sin, -cos),
            _ => (-cos, sin),
        }
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        DoubleDouble { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let (t, f) = two_sum(self.lo, rhs.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DoubleDouble { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = e + (self.hi * rhs.lo + self.lo * rhs.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DoubleDouble { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let q1 = self.hi / rhs.hi;
        let r = self - rhs * DoubleDouble::from(q1);
        let q2 = r.hi / rhs.hi;
        let r = r - rhs * DoubleDouble::from(q2);
        let q3 = r.hi / rhs.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DoubleDouble { hi, lo } + DoubleDouble::from(q3)
    }
}
