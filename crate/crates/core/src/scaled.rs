//! Floating-point numbers with an extended binary exponent, for products and
//! determinants whose magnitude leaves the `f64` range.

use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::algebra::{Field, Ring};

/// `mant · 2^exp` with `0.5 <= |mant| < 1`, or zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    mant: f64,
    exp: i64,
}

fn frexp(x: f64) -> (f64, i64) {
    if x == 0.0 || !x.is_finite() {
        return (x, 0);
    }
    let bits = x.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i64;
    if biased == 0 {
        let (m, e) = frexp(x * 2f64.powi(54));
        return (m, e - 54);
    }
    let m = f64::from_bits((bits & !(0x7ffu64 << 52)) | (1022u64 << 52));
    (m, biased - 1022)
}

fn ldexp(m: f64, e: i64) -> f64 {
    if m == 0.0 {
        return 0.0;
    }
    if e > 1100 {
        return m.signum() * f64::INFINITY;
    }
    if e < -1200 {
        return 0.0;
    }
    let half = e / 2;
    m * 2f64.powi(half as i32) * 2f64.powi((e - half) as i32)
}

impl Scaled {
    pub fn new(x: f64) -> Self {
        let (mant, exp) = frexp(x);
        Scaled { mant, exp }
    }

    pub fn to_f64(self) -> f64 {
        ldexp(self.mant, self.exp)
    }

    pub fn signum(self) -> f64 {
        if self.mant == 0.0 {
            0.0
        } else {
            self.mant.signum()
        }
    }

    pub fn abs(self) -> Self {
        Scaled { mant: self.mant.abs(), exp: self.exp }
    }

    /// `log2 |x|` (negative infinity for zero).
    pub fn log2_abs(self) -> f64 {
        if self.mant == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.mant.abs().log2() + self.exp as f64
        }
    }

    /// `self / other` as a plain float.
    pub fn ratio(self, other: Scaled) -> f64 {
        ldexp(self.mant / other.mant, self.exp - other.exp)
    }

    /// Binary exponent (zero for zero).
    pub fn exponent(self) -> i64 {
        self.exp
    }

    /// `self · 2^k`.
    pub fn shifted(self, k: i64) -> Self {
        if self.mant == 0.0 {
            self
        } else {
            Scaled { mant: self.mant, exp: self.exp + k }
        }
    }

    fn from_parts(m: f64, e: i64) -> Self {
        let (mant, de) = frexp(m);
        if mant == 0.0 {
            Scaled { mant: 0.0, exp: 0 }
        } else {
            Scaled { mant, exp: e + de }
        }
    }

    pub fn cmp_abs(self, other: Scaled) -> Ordering {
        self.log2_abs().partial_cmp(&other.log2_abs()).unwrap_or(Ordering::Equal)
    }
}

impl From<f64> for Scaled {
    fn from(x: f64) -> Self {
        Scaled::new(x)
    }
}

impl Add for Scaled {
    type Output = Scaled;
    fn add(self, rhs: Scaled) -> Scaled {
        if self.mant == 0.0 {
            return rhs;
        }
        if rhs.mant == 0.0 {
            return self;
        }
        let (big, small) = if self.exp >= rhs.exp { (self, rhs) } else { (rhs, self) };
        let shift = small.exp - big.exp;
        if shift < -60 {
            return big;
        }
        Scaled::from_parts(big.mant + ldexp(small.mant, shift), big.exp)
    }
}

impl Neg for Scaled {
    type Output = Scaled;
    fn neg(self) -> Scaled {
        Scaled { mant: -self.mant, exp: self.exp }
    }
}

impl Sub for Scaled {
    type Output = Scaled;
    fn sub(self, rhs: Scaled) -> Scaled {
        self + (-rhs)
    }
}

impl Mul for Scaled {
    type Output = Scaled;
    fn mul(self, rhs: Scaled) -> Scaled {
        Scaled::from_parts(self.mant * rhs.mant, self.exp + rhs.exp)
    }
}

impl Div for Scaled {
    type Output = Scaled;
    fn div(self, rhs: Scaled) -> Scaled {
        Scaled::from_parts(self.mant / rhs.mant, self.exp - rhs.exp)
    }
}

impl Ring for Scaled {
    fn zero() -> Self {
        Scaled { mant: 0.0, exp: 0 }
    }
    fn one() -> Self {
        Scaled::new(1.0)
    }
    fn from_int(n: i64) -> Self {
        Scaled::new(n as f64)
    }
    fn is_zero(&self) -> bool {
        self.mant == 0.0
    }
}

impl Field for Scaled {}
