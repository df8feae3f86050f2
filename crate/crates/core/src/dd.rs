//! Double-double arithmetic: an unevaluated sum `hi + lo` of two `f64`s
//! carrying roughly 106 bits (about 32 decimal digits) of significand.
//!
//! Basic operations follow the error-free transformations of Dekker and
//! Knuth; `exp`, `ln`, `sin`/`cos` use argument reduction followed by
//! Taylor series evaluated entirely in double-double.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, Sub, SubAssign};

use num_traits::{Num, One, Zero};

/// Extended-precision real number stored as a non-overlapping pair.
#[derive(Clone, Copy, Default, PartialEq)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

const EPS: f64 = 4.93038065763132e-32; // 2^-104

const PI: DoubleDouble = DoubleDouble {
    hi: std::f64::consts::PI,
    lo: 1.224_646_799_147_353_2e-16,
};
const TWO_PI: DoubleDouble = DoubleDouble {
    hi: std::f64::consts::TAU,
    lo: 2.449_293_598_294_706_4e-16,
};
const HALF_PI: DoubleDouble = DoubleDouble {
    hi: std::f64::consts::FRAC_PI_2,
    lo: 6.123_233_995_736_766e-17,
};
const LN_2: DoubleDouble = DoubleDouble {
    hi: std::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_6e-17,
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
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };

    /// Builds a value from two components, renormalizing them.
    pub fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        Self { hi, lo }
    }

    pub const fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn pi() -> Self {
        PI
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

    fn mul_f64(self, b: f64) -> Self {
        let (p1, p2) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p1, p2 + self.lo * b);
        Self { hi, lo }
    }

    fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let (p1, p2) = two_prod(q1, b);
        let (s, e) = two_sum(self.hi, -p1);
        let e = e - p2 + self.lo;
        let q2 = (s + e) / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo }
    }

    fn scale_pow2(self, s: f64) -> Self {
        Self {
            hi: self.hi * s,
            lo: self.lo * s,
        }
    }

    fn square(self) -> Self {
        self * self
    }

    /// Nearest integer, ties away from zero.
    fn round(self) -> Self {
        let hi = self.hi.round();
        if hi == self.hi {
            let lo = self.lo.round();
            Self::new(hi, lo)
        } else {
            // `lo` can only matter when `hi` sits exactly on a half-integer.
            let hi = if (hi - self.hi).abs() == 0.5 && self.lo != 0.0 {
                if self.lo > 0.0 {
                    (self.hi + 0.5).floor()
                } else {
                    (self.hi - 0.5).ceil()
                }
            } else {
                hi
            };
            Self { hi, lo: 0.0 }
        }
    }

    pub fn floor(self) -> Self {
        let hi = self.hi.floor();
        if hi == self.hi {
            Self::new(hi, self.lo.floor())
        } else {
            Self { hi, lo: 0.0 }
        }
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 {
                Self::ZERO
            } else {
                Self::from_f64(f64::NAN)
            };
        }
        let x = 1.0 / self.hi.sqrt();
        let ax = self.hi * x;
        let ax_dd = Self::from_f64(ax);
        let corr = (self - ax_dd.square()).hi * (x * 0.5);
        let (hi, lo) = two_sum(ax, corr);
        Self { hi, lo }
    }

    pub fn exp(self) -> Self {
        if self.hi <= -709.0 {
            return Self::ZERO;
        }
        if self.hi >= 709.0 {
            return Self::from_f64(f64::INFINITY);
        }
        if self.hi == 0.0 {
            return Self::ONE;
        }
        let m = (self.hi / LN_2.hi + 0.5).floor();
        let r = (self - LN_2.mul_f64(m)).scale_pow2(1.0 / 512.0);
        let s = expm1_taylor(r);
        // (1 + s)^512 - 1 by repeated squaring of 1 + s.
        let mut s = s;
        for _ in 0..9 {
            s = s.scale_pow2(2.0) + s.square();
        }
        let e = s + Self::ONE;
        let scale = 2f64.powi(m as i32);
        e.scale_pow2(scale)
    }

    pub fn exp_m1(self) -> Self {
        if self.hi.abs() < 0.5 {
            expm1_taylor(self)
        } else {
            self.exp() - Self::ONE
        }
    }

    pub fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return Self::from_f64(if self.hi == 0.0 {
                f64::NEG_INFINITY
            } else {
                f64::NAN
            });
        }
        if self == Self::ONE {
            return Self::ZERO;
        }
        // Two Newton steps on exp(x) = a; the first one already doubles the f64 start.
        let mut x = Self::from_f64(self.hi.ln());
        for _ in 0..2 {
            x = x + self * (-x).exp() - Self::ONE;
        }
        x
    }

    pub fn sin_cos(self) -> (Self, Self) {
        if self.hi == 0.0 {
            return (Self::ZERO, Self::ONE);
        }
        let z = (self / TWO_PI).round();
        let r = self - TWO_PI * z;
        let j = (r / HALF_PI).round();
        let t = r - HALF_PI * j;
        let (s, c) = sin_cos_taylor(t);
        match (j.hi as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }
}

/// exp(r) - 1 for |r| < 0.5 by Taylor series.
fn expm1_taylor(r: DoubleDouble) -> DoubleDouble {
    let mut sum = r;
    let mut term = r;
    let mut n = 1.0;
    loop {
        n += 1.0;
        term = (term * r).div_f64(n);
        sum += term;
        if term.hi.abs() <= EPS * sum.hi.abs() || n > 60.0 {
            break;
        }
    }
    sum
}

/// Taylor series for |t| <= pi/4.
fn sin_cos_taylor(t: DoubleDouble) -> (DoubleDouble, DoubleDouble) {
    let t2 = t.square();
    let mut sin = t;
    let mut term = t;
    let mut k = 1.0;
    loop {
        term = -(term * t2).div_f64((k + 1.0) * (k + 2.0));
        k += 2.0;
        sin += term;
        if term.hi.abs() <= EPS * sin.hi.abs().max(EPS) || k > 60.0 {
            break;
        }
    }
    let mut cos = DoubleDouble::ONE;
    let mut term = DoubleDouble::ONE;
    let mut k = 0.0;
    loop {
        term = -(term * t2).div_f64((k + 1.0) * (k + 2.0));
        k += 2.0;
        cos += term;
        if term.hi.abs() <= EPS || k > 60.0 {
            break;
        }
    }
    (sin, cos)
}

impl fmt::Debug for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DoubleDouble({:e} + {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Self { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let (p1, p2) = two_prod(self.hi, b.hi);
        let p2 = p2 + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p1, p2);
        Self { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        Self { hi: q1, lo: q2 } + Self::from_f64(q3)
    }
}

impl Rem for DoubleDouble {
    type Output = Self;
    fn rem(self, b: Self) -> Self {
        let q = self / b;
        let q = if q.hi < 0.0 { -(-q).floor() } else { q.floor() };
        self - q * b
    }
}

macro_rules! assign_op {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr for DoubleDouble {
            fn $m(&mut self, rhs: Self) {
                *self = *self $op rhs;
            }
        }
    };
}
assign_op!(AddAssign, add_assign, +);
assign_op!(SubAssign, sub_assign, -);
assign_op!(MulAssign, mul_assign, *);
assign_op!(DivAssign, div_assign, /);

impl Zero for DoubleDouble {
    fn zero() -> Self {
        Self::ZERO
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        Self::ONE
    }
}

impl Num for DoubleDouble {
    type FromStrRadixErr = std::num::ParseFloatError;

    /// Parses through `f64`; only decimal radix is supported.
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        debug_assert_eq!(radix, 10);
        s.parse::<f64>().map(Self::from_f64)
    }
}

impl Sum for DoubleDouble {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |a, b| a + b)
    }
}
